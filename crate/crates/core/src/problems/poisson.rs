//! Two-dimensional Poisson problems with sharply peaked Gaussian solutions.
//! Forcings are manufactured from the exact solutions: for u = e^{−a r²} in
//! d dimensions, Δu = (4a²r² − 2ad)u, so f = −Δu = (2ad − 4a²r²)u.

use std::sync::Arc;

use crate::deriv::{DerivativeBasis, Jet};

use super::{BoundaryCondition, BoundaryOp, Domain, FaceSet, PointFn, ProblemSpec, ResidualForm};

const PEAK_SHARPNESS: f64 = 500.0;

fn gaussian(point: &[f64], center: &[f64], a: f64) -> f64 {
    let r2: f64 = point.iter().zip(center).map(|(x, c)| (x - c) * (x - c)).sum();
    (-a * r2).exp()
}

fn gaussian_forcing(point: &[f64], center: &[f64], a: f64) -> f64 {
    let d = point.len() as f64;
    let r2: f64 = point.iter().zip(center).map(|(x, c)| (x - c) * (x - c)).sum();
    (2.0 * a * d - 4.0 * a * a * r2) * (-a * r2).exp()
}

pub(crate) fn gaussian_jet(jets: &[Jet<f64>], center: &[f64], a: f64) -> Jet<f64> {
    let basis = jets[0].basis();
    let mut r2 = Jet::constant(basis, 0.0, 0.0);
    for (jet, &c) in jets.iter().zip(center) {
        let shifted = jet.clone() - Jet::constant(basis, 0.0, c);
        r2 = r2 + shifted.clone() * shifted;
    }
    r2.scale(-a).exp()
}

fn poisson_2d(
    name: &'static str,
    centers: &'static [[f64; 2]],
) -> ProblemSpec {
    let basis = DerivativeBasis::closure(2, &[vec![2, 0], vec![0, 2]]).unwrap();
    let second = vec![
        basis.second_deriv(0).unwrap(),
        basis.second_deriv(1).unwrap(),
    ];
    let exact: PointFn = Arc::new(move |p: &[f64]| {
        centers.iter().map(|c| gaussian(p, c, PEAK_SHARPNESS)).sum()
    });
    let forcing: PointFn = Arc::new(move |p: &[f64]| {
        centers.iter().map(|c| gaussian_forcing(p, c, PEAK_SHARPNESS)).sum()
    });
    let exact_jet = Arc::new(move |jets: &[Jet<f64>]| {
        let mut acc = gaussian_jet(jets, &centers[0], PEAK_SHARPNESS);
        for c in &centers[1..] {
            acc = acc + gaussian_jet(jets, c, PEAK_SHARPNESS);
        }
        acc
    });
    ProblemSpec {
        name,
        dimension: 2,
        domain: Domain::new(vec![(-1.0, 1.0), (-1.0, 1.0)]),
        basis,
        residual: ResidualForm::NegLaplacian { second },
        forcing,
        exact_u: Arc::clone(&exact),
        exact_jet,
        boundary: vec![BoundaryCondition {
            op: BoundaryOp::Value,
            faces: FaceSet::AllFaces,
            target: exact,
        }],
        time_axis: None,
    }
}

/// −Δu = f on [−1,1]² with a single Gaussian peak at (0.5, 0.5).
pub fn make_single_peak() -> ProblemSpec {
    poisson_2d("single-peak", &[[0.5, 0.5]])
}

/// Same operator with peaks at (−0.5,−0.5) and (0.5,0.5); the exact solution
/// is the sum of the two Gaussians.
pub fn make_dual_peak() -> ProblemSpec {
    poisson_2d("dual-peak", &[[-0.5, -0.5], [0.5, 0.5]])
}
