//! Physics losses. The [`JetField`] abstraction lets the same loss
//! definitions run over a network surrogate or the exact solution (which is
//! how the manufactured-solution identities are checked).

use std::sync::Arc;

use crate::deriv::{DerivativeBasis, Jet};
use crate::network::{forward_jet_f64, MlpSpec, ParamVector};
use crate::problems::{BoundaryBatch, BoundaryOp, ProblemSpec};
use crate::{Error, Result};

/// Loss weighting between the residual and boundary terms.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct LossWeights {
    pub lambda_r: f64,
    pub lambda_b: f64,
}

impl LossWeights {
    pub fn new(lambda_r: f64, lambda_b: f64) -> Result<Self> {
        if lambda_r < 0.0 || lambda_b < 0.0 || (lambda_r == 0.0 && lambda_b == 0.0) {
            return Err(Error::InvalidConfig(
                "loss weights must be nonnegative and not both zero".into(),
            ));
        }
        Ok(Self { lambda_r, lambda_b })
    }
}

impl Default for LossWeights {
    fn default() -> Self {
        Self { lambda_r: 1.0, lambda_b: 1.0 }
    }
}

/// Anything that can produce the solution jet at a point.
pub trait JetField {
    fn eval_jet(&self, point: &[f64]) -> Result<Jet<f64>>;
}

/// Network-backed field.
pub struct MlpField<'a> {
    pub spec: &'a MlpSpec,
    pub params: &'a ParamVector,
    pub basis: &'a Arc<DerivativeBasis>,
}

impl JetField for MlpField<'_> {
    fn eval_jet(&self, point: &[f64]) -> Result<Jet<f64>> {
        forward_jet_f64(self.spec, self.params, self.basis, point)
    }
}

/// Exact-solution field, for identity checks.
pub struct ExactField<'a>(pub &'a ProblemSpec);

impl JetField for ExactField<'_> {
    fn eval_jet(&self, point: &[f64]) -> Result<Jet<f64>> {
        let jets = crate::deriv::seed_coordinates(point, &self.0.basis)?;
        Ok((self.0.exact_jet)(&jets))
    }
}

/// Coefficient positions a boundary operator reads, resolved once per
/// problem: applying the operator is a unit-weight sum over these.
pub fn boundary_op_indices(problem: &ProblemSpec, op: BoundaryOp) -> Vec<usize> {
    match op {
        BoundaryOp::Value => vec![0],
        BoundaryOp::Laplacian => (0..problem.dimension)
            .filter(|axis| Some(*axis) != problem.time_axis)
            .map(|axis| problem.basis.second_deriv(axis).expect("basis tracks Laplacian"))
            .collect(),
        BoundaryOp::TimeDerivative => {
            let t = problem.time_axis.expect("time derivative on a steady problem");
            vec![problem.basis.first_deriv(t).expect("basis tracks u_t")]
        }
    }
}

/// Mean squared PDE residual over collocation points.
pub fn residual_loss(
    problem: &ProblemSpec,
    field: &dyn JetField,
    points: &[Vec<f64>],
) -> Result<f64> {
    if points.is_empty() {
        return Err(Error::EmptyInput { context: "residual loss".into() });
    }
    let mut acc = 0.0;
    for p in points {
        if !problem.domain.contains(p) {
            return Err(Error::OutsideDomain(p.clone()));
        }
        let jet = field.eval_jet(p)?;
        let r = problem.residual.eval_coeffs(jet.coeffs(), (problem.forcing)(p));
        if !r.is_finite() {
            return Err(Error::NonFinite { context: format!("residual at {p:?}") });
        }
        acc += r * r;
    }
    Ok(acc / points.len() as f64)
}

/// Sum over boundary terms of the mean squared operator mismatch.
pub fn boundary_loss(
    problem: &ProblemSpec,
    field: &dyn JetField,
    batches: &[BoundaryBatch],
) -> Result<f64> {
    if batches.is_empty() {
        return Err(Error::EmptyInput { context: "boundary loss".into() });
    }
    let mut total = 0.0;
    for batch in batches {
        if batch.points.is_empty() {
            return Err(Error::EmptyInput { context: "boundary batch".into() });
        }
        let indices = boundary_op_indices(problem, batch.op);
        let mut acc = 0.0;
        for (p, target) in batch.points.iter().zip(&batch.targets) {
            let jet = field.eval_jet(p)?;
            let value: f64 = indices.iter().map(|&i| jet.coeffs()[i]).sum();
            let m = value - target;
            if !m.is_finite() {
                return Err(Error::NonFinite { context: format!("boundary mismatch at {p:?}") });
            }
            acc += m * m;
        }
        total += acc / batch.points.len() as f64;
    }
    Ok(total)
}

/// Weighted composite of already-computed loss components.
pub fn composite_loss(residual: f64, boundary: f64, weights: LossWeights) -> f64 {
    weights.lambda_r * residual + weights.lambda_b * boundary
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::{Activation, MlpSpec, ParamVector};
    use crate::problems::{make_biharmonic, make_single_peak, sample_boundary};
    use approx::assert_relative_eq;

    fn zero_net() -> (MlpSpec, ParamVector) {
        let spec = MlpSpec::new(2, vec![4, 4], 1, Activation::Tanh).unwrap();
        let params = ParamVector::zeros(&spec);
        (spec, params)
    }

    // with u ≡ 0 the Poisson residual is −f, so the loss is mean f²
    #[test]
    fn zero_network_residual_loss_is_mean_forcing_squared() {
        let problem = make_single_peak();
        let (spec, params) = zero_net();
        let field = MlpField { spec: &spec, params: &params, basis: &problem.basis };
        let points: Vec<Vec<f64>> =
            vec![vec![0.5, 0.5], vec![0.4, 0.6], vec![0.0, 0.0], vec![-0.7, 0.2]];
        let got = residual_loss(&problem, &field, &points).unwrap();
        let want: f64 = points.iter().map(|p| (problem.forcing)(p).powi(2)).sum::<f64>()
            / points.len() as f64;
        assert_relative_eq!(got, want, max_relative = 1e-12);
    }

    #[test]
    fn exact_surrogate_losses_are_tiny() {
        let problem = make_single_peak();
        let field = ExactField(&problem);
        let mut rng = crate::rng::seeded_rng(2);
        use rand::Rng;
        let points: Vec<Vec<f64>> =
            (0..50).map(|_| vec![rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)]).collect();
        assert!(residual_loss(&problem, &field, &points).unwrap() < 1e-10);

        let batches = sample_boundary(&problem, 80, 3).unwrap();
        assert!(boundary_loss(&problem, &field, &batches).unwrap() < 1e-20);
    }

    #[test]
    fn duplicating_points_preserves_the_mean() {
        let problem = make_single_peak();
        let (spec, params) = zero_net();
        let field = MlpField { spec: &spec, params: &params, basis: &problem.basis };
        let points: Vec<Vec<f64>> = vec![vec![0.5, 0.5], vec![0.1, -0.3]];
        let doubled: Vec<Vec<f64>> = points.iter().chain(points.iter()).cloned().collect();
        let a = residual_loss(&problem, &field, &points).unwrap();
        let b = residual_loss(&problem, &field, &doubled).unwrap();
        assert_relative_eq!(a, b, max_relative = 1e-15);
    }

    // zero-parameter network on single-peak: boundary loss is mean g²
    #[test]
    fn zero_network_boundary_loss_is_mean_target_squared() {
        let problem = make_single_peak();
        let (spec, params) = zero_net();
        let field = MlpField { spec: &spec, params: &params, basis: &problem.basis };
        let batches = sample_boundary(&problem, 40, 7).unwrap();
        let got = boundary_loss(&problem, &field, &batches).unwrap();
        let want: f64 = batches[0].targets.iter().map(|t| t * t).sum::<f64>()
            / batches[0].targets.len() as f64;
        assert_relative_eq!(got, want, max_relative = 1e-12);
    }

    #[test]
    fn empty_inputs_are_rejected() {
        let problem = make_single_peak();
        let (spec, params) = zero_net();
        let field = MlpField { spec: &spec, params: &params, basis: &problem.basis };
        assert!(matches!(
            residual_loss(&problem, &field, &[]),
            Err(Error::EmptyInput { .. })
        ));
        let mut batches = sample_boundary(&problem, 8, 0).unwrap();
        batches.push(BoundaryBatch {
            points: vec![],
            op: BoundaryOp::Value,
            targets: vec![],
        });
        assert!(matches!(
            boundary_loss(&problem, &field, &batches),
            Err(Error::EmptyInput { .. })
        ));
    }

    #[test]
    fn out_of_domain_point_is_rejected() {
        let problem = make_single_peak();
        let (spec, params) = zero_net();
        let field = MlpField { spec: &spec, params: &params, basis: &problem.basis };
        let err = residual_loss(&problem, &field, &[vec![2.0, 0.0]]).unwrap_err();
        assert!(matches!(err, Error::OutsideDomain(_)));
    }

    #[test]
    fn composite_examples() {
        let w = LossWeights::default();
        assert_eq!(composite_loss(0.5, 0.2, w), 0.7);
        assert_eq!(composite_loss(0.5, 0.2, LossWeights { lambda_r: 0.0, lambda_b: 1.0 }), 0.2);
        assert_eq!(composite_loss(0.0, 0.0, w), 0.0);
        assert!(LossWeights::new(0.0, 0.0).is_err());
    }

    #[test]
    fn biharmonic_sums_value_and_laplacian_terms() {
        let problem = make_biharmonic();
        let (spec, params) = zero_net();
        let field = MlpField { spec: &spec, params: &params, basis: &problem.basis };
        let batches = sample_boundary(&problem, 20, 1).unwrap();
        let got = boundary_loss(&problem, &field, &batches).unwrap();
        let mean_sq = |b: &BoundaryBatch| {
            b.targets.iter().map(|t| t * t).sum::<f64>() / b.targets.len() as f64
        };
        let want = mean_sq(&batches[0]) + mean_sq(&batches[1]);
        assert_relative_eq!(got, want, max_relative = 1e-12);
    }
}
