//! Fast composite-loss gradient: structural jet backprop over fixed point
//! chunks. Chunk boundaries depend only on the workload size, and partial
//! results are combined in chunk order, so the result is bitwise
//! reproducible regardless of thread count. Verified against the tape path
//! and finite differences in tests.

use rayon::prelude::*;

use crate::network::trace::{backward_jet_traced, forward_jet_traced, JetWorkspace};
use crate::network::{MlpSpec, ParamVector};
use crate::problems::{BoundaryBatch, ProblemSpec};
use crate::{Error, Result};

use super::loss::{boundary_op_indices, LossWeights};

const CHUNKS: usize = 32;

pub struct LossAndGrad {
    pub residual: f64,
    pub boundary: f64,
    pub composite: f64,
    pub grad: Vec<f64>,
}

struct Unit {
    ws: JetWorkspace,
    grad: Vec<f64>,
    adjoint: Vec<f64>,
    loss_r: f64,
    loss_b: f64,
    failed: Option<Error>,
}

/// Reusable engine: per-chunk workspaces and gradient buffers.
pub struct GradEngine {
    mlp: MlpSpec,
    units: Vec<Unit>,
}

impl GradEngine {
    pub fn new(problem: &ProblemSpec, mlp: &MlpSpec) -> Self {
        let k = problem.basis.len();
        let n_params = mlp.param_count();
        let units = (0..CHUNKS)
            .map(|_| Unit {
                ws: JetWorkspace::new(mlp, std::sync::Arc::clone(&problem.basis)),
                grad: vec![0.0; n_params],
                adjoint: vec![0.0; k],
                loss_r: 0.0,
                loss_b: 0.0,
                failed: None,
            })
            .collect();
        Self { mlp: mlp.clone(), units }
    }

    /// Composite loss and its parameter gradient over the full batch.
    pub fn compute(
        &mut self,
        problem: &ProblemSpec,
        params: &ParamVector,
        interior: &[Vec<f64>],
        batches: &[BoundaryBatch],
        weights: LossWeights,
    ) -> Result<LossAndGrad> {
        let n_interior = interior.len();
        if n_interior == 0 {
            return Err(Error::EmptyInput { context: "collocation set".into() });
        }
        for b in batches {
            if b.points.is_empty() {
                return Err(Error::EmptyInput { context: "boundary batch".into() });
            }
        }

        // flatten work items: interior points first, then batch points
        let mut batch_offsets = Vec::with_capacity(batches.len());
        let mut total = n_interior;
        for b in batches {
            batch_offsets.push(total);
            total += b.points.len();
        }
        let op_indices: Vec<Vec<usize>> =
            batches.iter().map(|b| boundary_op_indices(problem, b.op)).collect();

        let mlp = &self.mlp;
        let chunk = total.div_ceil(CHUNKS);
        self.units
            .par_iter_mut()
            .enumerate()
            .for_each(|(c, unit)| {
                unit.loss_r = 0.0;
                unit.loss_b = 0.0;
                unit.grad.fill(0.0);
                unit.failed = None;
                let start = c * chunk;
                let end = ((c + 1) * chunk).min(total);
                for item in start..end {
                    let (point, scale_kind) = if item < n_interior {
                        (&interior[item], None)
                    } else {
                        let b = match batch_offsets.iter().rposition(|&o| o <= item) {
                            Some(b) => b,
                            None => unreachable!(),
                        };
                        (&batches[b].points[item - batch_offsets[b]], Some(b))
                    };
                    if let Err(e) = forward_jet_traced(mlp, params, point, &mut unit.ws) {
                        unit.failed = Some(e);
                        return;
                    }
                    match scale_kind {
                        None => {
                            let f = (problem.forcing)(point);
                            let r = problem.residual.eval_coeffs(unit.ws.output(), f);
                            unit.loss_r += r * r;
                            problem.residual.adjoint_coeffs(unit.ws.output(), &mut unit.adjoint);
                            let scale =
                                weights.lambda_r * 2.0 * r / n_interior as f64;
                            for a in unit.adjoint.iter_mut() {
                                *a *= scale;
                            }
                        }
                        Some(b) => {
                            let idx = item - batch_offsets[b];
                            let target = batches[b].targets[idx];
                            let value: f64 =
                                op_indices[b].iter().map(|&i| unit.ws.output()[i]).sum();
                            let m = value - target;
                            unit.loss_b += m * m / batches[b].points.len() as f64;
                            unit.adjoint.fill(0.0);
                            let scale = weights.lambda_b * 2.0 * m
                                / batches[b].points.len() as f64;
                            for &i in &op_indices[b] {
                                unit.adjoint[i] = scale;
                            }
                        }
                    }
                    backward_jet_traced(mlp, params, &unit.adjoint, &mut unit.ws, &mut unit.grad);
                }
            });

        for unit in &mut self.units {
            if let Some(e) = unit.failed.take() {
                return Err(e);
            }
        }

        let mut grad = vec![0.0; params.len()];
        let mut loss_r = 0.0;
        let mut loss_b = 0.0;
        for unit in &self.units {
            loss_r += unit.loss_r;
            loss_b += unit.loss_b;
            for (g, u) in grad.iter_mut().zip(&unit.grad) {
                *g += u;
            }
        }
        loss_r /= n_interior as f64;
        let composite = weights.lambda_r * loss_r + weights.lambda_b * loss_b;
        if !composite.is_finite() {
            return Err(Error::NonFinite { context: "composite loss".into() });
        }
        Ok(LossAndGrad { residual: loss_r, boundary: loss_b, composite, grad })
    }
}
