//! Full-batch training: Adam for a fixed iteration count, then optional
//! L-BFGS fine-tuning. One iteration is one optimizer step over every
//! current collocation and boundary point.

use std::time::Instant;

use crate::network::ParamVector;
use crate::optim::{adam_step, lbfgs_step, AdamState, LbfgsState};
use crate::problems::{BoundaryBatch, ProblemSpec};
use crate::{Error, Result};

use super::grad::GradEngine;
use super::loss::LossWeights;

/// Divergence guard: abort when the composite loss exceeds this.
pub const ABORT_THRESHOLD: f64 = 1e8;

#[derive(Debug, Clone)]
pub struct TrainConfig {
    pub iterations: usize,
    pub lbfgs_iterations: usize,
    pub learning_rate: f64,
    pub weights: LossWeights,
    /// Loss-history subsampling stride (first and last rows always kept).
    pub record_every: usize,
}

impl TrainConfig {
    pub fn adam_only(iterations: usize, learning_rate: f64, weights: LossWeights) -> Self {
        Self {
            iterations,
            lbfgs_iterations: 0,
            learning_rate,
            weights,
            record_every: (iterations / 200).max(1),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HistoryRow {
    pub iteration: usize,
    pub loss_r: f64,
    pub loss_b: f64,
    pub composite: f64,
}

#[derive(Debug, Clone)]
pub struct TrainReport {
    pub iterations_run: usize,
    pub final_loss: f64,
    pub history: Vec<HistoryRow>,
    pub wall_seconds: f64,
    /// Set when the divergence guard fired; parameters roll back to the last
    /// finite state.
    pub aborted: Option<String>,
}

/// Run the configured optimizer plan in place. Deterministic given identical
/// inputs; loss history rows are recorded at `record_every` strides.
pub fn train(
    problem: &ProblemSpec,
    engine: &mut GradEngine,
    params: &mut ParamVector,
    interior: &[Vec<f64>],
    boundary: &[BoundaryBatch],
    config: &TrainConfig,
) -> Result<TrainReport> {
    if config.iterations == 0 && config.lbfgs_iterations == 0 {
        return Err(Error::EmptyInput { context: "training iterations".into() });
    }
    let start = Instant::now();
    let mut history = Vec::new();
    let mut adam = AdamState::new(params.len(), config.learning_rate);
    let mut last_loss = f64::NAN;
    let mut iterations_run = 0;

    for it in 0..config.iterations {
        let out = engine.compute(problem, params, interior, boundary, config.weights)?;
        if out.composite > ABORT_THRESHOLD || !out.composite.is_finite() {
            return Ok(TrainReport {
                iterations_run,
                final_loss: last_loss,
                history,
                wall_seconds: start.elapsed().as_secs_f64(),
                aborted: Some(format!(
                    "composite loss {} exceeded the divergence guard at iteration {it}",
                    out.composite
                )),
            });
        }
        let snapshot = params.values.clone();
        if let Err(e) = adam_step(&mut adam, &mut params.values, &out.grad) {
            params.values = snapshot;
            return Ok(TrainReport {
                iterations_run,
                final_loss: out.composite,
                history,
                wall_seconds: start.elapsed().as_secs_f64(),
                aborted: Some(format!("optimizer rejected the update at iteration {it}: {e}")),
            });
        }
        last_loss = out.composite;
        iterations_run += 1;
        if it % config.record_every == 0 || it + 1 == config.iterations {
            history.push(HistoryRow {
                iteration: it,
                loss_r: out.residual,
                loss_b: out.boundary,
                composite: out.composite,
            });
        }
    }

    if config.lbfgs_iterations > 0 {
        let mut state = LbfgsState::new(10);
        let mut values = params.values.clone();
        let mut candidate = params.clone();
        let mut aborted = None;
        for it in 0..config.lbfgs_iterations {
            let step_result = {
                let mut eval_err = None;
                let loss = lbfgs_step(&mut state, &mut values, |v| {
                    candidate.values.copy_from_slice(v);
                    match engine.compute(problem, &candidate, interior, boundary, config.weights)
                    {
                        Ok(out) => (out.composite, out.grad),
                        Err(e) => {
                            eval_err = Some(e);
                            (f64::INFINITY, vec![0.0; v.len()])
                        }
                    }
                });
                match (loss, eval_err) {
                    (Ok(l), None) => Ok(l),
                    (_, Some(e)) => Err(e),
                    (Err(e), _) => Err(e),
                }
            };
            match step_result {
                Ok(loss) => {
                    last_loss = loss;
                    iterations_run += 1;
                    if it % config.record_every == 0 || it + 1 == config.lbfgs_iterations {
                        history.push(HistoryRow {
                            iteration: config.iterations + it,
                            loss_r: f64::NAN,
                            loss_b: f64::NAN,
                            composite: loss,
                        });
                    }
                }
                Err(e) => {
                    aborted = Some(format!("l-bfgs evaluation failed at iteration {it}: {e}"));
                    break;
                }
            }
        }
        if aborted.is_none() {
            params.values = values;
        }
        if let Some(msg) = aborted {
            return Ok(TrainReport {
                iterations_run,
                final_loss: last_loss,
                history,
                wall_seconds: start.elapsed().as_secs_f64(),
                aborted: Some(msg),
            });
        }
    }

    Ok(TrainReport {
        iterations_run,
        final_loss: last_loss,
        history,
        wall_seconds: start.elapsed().as_secs_f64(),
        aborted: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::{init_params, Activation, MlpSpec};
    use crate::problems::{make_single_peak, sample_boundary};

    fn setup() -> (ProblemSpec, MlpSpec, GradEngine, Vec<Vec<f64>>, Vec<BoundaryBatch>) {
        let problem = make_single_peak();
        let mlp = MlpSpec::new(2, vec![8, 8], 1, Activation::Tanh).unwrap();
        let engine = GradEngine::new(&problem, &mlp);
        let mut rng = crate::rng::seeded_rng(33);
        let interior: Vec<Vec<f64>> = (0..64).map(|_| problem.domain.sample(&mut rng)).collect();
        let boundary = sample_boundary(&problem, 32, 5).unwrap();
        (problem, mlp, engine, interior, boundary)
    }

    #[test]
    fn zero_iterations_is_an_error() {
        let (problem, mlp, mut engine, interior, boundary) = setup();
        let mut params = init_params(&mlp, 0);
        let cfg = TrainConfig::adam_only(0, 1e-3, LossWeights::default());
        assert!(matches!(
            train(&problem, &mut engine, &mut params, &interior, &boundary, &cfg),
            Err(Error::EmptyInput { .. })
        ));
    }

    #[test]
    fn training_reduces_the_loss() {
        let (problem, mlp, mut engine, interior, boundary) = setup();
        let mut params = init_params(&mlp, 1);
        let initial = engine
            .compute(&problem, &params, &interior, &boundary, LossWeights::default())
            .unwrap()
            .composite;
        let cfg = TrainConfig::adam_only(300, 1e-3, LossWeights::default());
        let report =
            train(&problem, &mut engine, &mut params, &interior, &boundary, &cfg).unwrap();
        assert!(report.aborted.is_none());
        assert!(report.final_loss < initial, "{} !< {initial}", report.final_loss);
        assert_eq!(report.iterations_run, 300);
        // history indices are nondecreasing
        assert!(report.history.windows(2).all(|w| w[0].iteration <= w[1].iteration));
        assert!(report.wall_seconds >= 0.0);
    }

    #[test]
    fn training_is_deterministic() {
        let (problem, mlp, mut engine, interior, boundary) = setup();
        let cfg = TrainConfig::adam_only(50, 1e-3, LossWeights::default());
        let mut p1 = init_params(&mlp, 2);
        let r1 = train(&problem, &mut engine, &mut p1, &interior, &boundary, &cfg).unwrap();
        let mut p2 = init_params(&mlp, 2);
        let r2 = train(&problem, &mut engine, &mut p2, &interior, &boundary, &cfg).unwrap();
        assert_eq!(r1.final_loss, r2.final_loss);
        assert_eq!(p1.values, p2.values);
    }

    #[test]
    fn lbfgs_phase_continues_reducing() {
        let (problem, mlp, mut engine, interior, boundary) = setup();
        let mut params = init_params(&mlp, 3);
        let cfg = TrainConfig {
            iterations: 100,
            lbfgs_iterations: 20,
            learning_rate: 1e-3,
            weights: LossWeights::default(),
            record_every: 10,
        };
        let report =
            train(&problem, &mut engine, &mut params, &interior, &boundary, &cfg).unwrap();
        assert!(report.aborted.is_none());
        assert_eq!(report.iterations_run, 120);
        let adam_rows: Vec<_> =
            report.history.iter().filter(|r| r.iteration < 100).collect();
        let last_adam = adam_rows.last().unwrap().composite;
        assert!(report.final_loss <= last_adam * 1.0001);
    }
}
