//! The three-phase experiment pipeline: pretrain on uniform points, sample
//! with the configured strategy, train to the final budget, evaluate.
//!
//! Budget parity: the multi-round baselines add t_max·S points and train
//! per_round iterations inside each round; the uniform baseline draws the
//! same t_max·S points in one batch and trains the same total budget; the
//! rl sampler adds at most its buffer capacity and trains the final budget.

use crate::network::{init_params, Activation, MlpSpec, ParamVector};
use crate::pinn::{
    build_test_set, predict, relative_l2, train, GradEngine, HistoryRow, TrainConfig,
};
use crate::problems::{sample_boundary, ProblemSpec};
use crate::rng::{derive_seed, Stream};
use crate::samplers::{
    adaptive_rounds, rl_run, uniform_sample, NetSurrogate, RoundsConfig, SamplerResult, Strategy,
};
use crate::Result;

use super::config::{RunConfig, SamplerId};

/// One experiment outcome, mirroring a results-table row.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub case: String,
    pub sampler: String,
    pub seed: u64,
    pub points_added: usize,
    pub sampling_time_s: f64,
    pub training_time_s: f64,
    pub rel_l2: f64,
    /// rl only; absent for the other samplers.
    pub episodes_used: Option<usize>,
}

/// Everything worth persisting besides the record row.
pub struct Artifacts {
    pub added_points: Vec<Vec<f64>>,
    pub scores: Option<Vec<f64>>,
    pub history: Vec<HistoryRow>,
    pub mlp: MlpSpec,
    pub params: ParamVector,
    /// Divergence-guard message, when a training phase rolled back.
    pub aborted: Option<String>,
}

fn stitch(history: &mut Vec<HistoryRow>, offset: usize, rows: &[HistoryRow]) -> usize {
    let mut max_it = 0;
    for row in rows {
        history.push(HistoryRow { iteration: offset + row.iteration, ..*row });
        max_it = max_it.max(row.iteration + 1);
    }
    offset + max_it
}

/// Run one (case, sampler, seed) experiment end to end.
pub fn run_pipeline(cfg: &RunConfig) -> Result<(RunRecord, Artifacts)> {
    cfg.validate()?;
    let problem: ProblemSpec = cfg.case.build();
    let mlp = MlpSpec::new(problem.dimension, cfg.hidden.clone(), 1, Activation::Tanh)?;
    let mut params = init_params(&mlp, derive_seed(cfg.seed, Stream::NetworkInit));
    let mut engine = GradEngine::new(&problem, &mlp);

    let mut collocation =
        uniform_sample(&problem.domain, cfg.n_r0, derive_seed(cfg.seed, Stream::Collocation))?
            .points;
    let boundary = sample_boundary(&problem, cfg.n_b, derive_seed(cfg.seed, Stream::Boundary))?;

    let mut history = Vec::new();
    let mut offset = 0;
    let mut training_time = 0.0;
    let mut aborted = None;

    // phase 1: pretrain
    let pretrain_cfg = TrainConfig::adam_only(cfg.pretrain_iters, cfg.pinn_lr, cfg.weights);
    let report = train(&problem, &mut engine, &mut params, &collocation, &boundary, &pretrain_cfg)?;
    training_time += report.wall_seconds;
    offset = stitch(&mut history, offset, &report.history);
    if let Some(msg) = report.aborted {
        aborted = Some(format!("pretraining: {msg}"));
    }

    // phase 2: sample
    let sampler_seed = derive_seed(cfg.seed, Stream::Sampler);
    let budget = cfg.t_max * cfg.s_per_round;
    let (sampler_out, needs_final_training): (SamplerResult, bool) = match cfg.sampler {
        SamplerId::Uniform => (uniform_sample(&problem.domain, budget, sampler_seed)?, true),
        SamplerId::Rl => {
            let surrogate = NetSurrogate { spec: &mlp, params: &params };
            (rl_run(&problem, &surrogate, &cfg.rl, sampler_seed)?, true)
        }
        SamplerId::Rar | SamplerId::Rad => {
            let strategy = if cfg.sampler == SamplerId::Rar {
                Strategy::Refinement
            } else {
                Strategy::Distribution
            };
            let rounds = RoundsConfig {
                t_max: cfg.t_max,
                candidate_pool: cfg.s0,
                added_per_round: cfg.s_per_round,
                train: TrainConfig {
                    iterations: cfg.per_round_iters,
                    lbfgs_iterations: cfg.per_round_lbfgs_iters,
                    learning_rate: cfg.pinn_lr,
                    weights: cfg.weights,
                    record_every: (cfg.per_round_iters / 40).max(1),
                },
            };
            let (result, reports) = adaptive_rounds(
                strategy,
                &problem,
                &mlp,
                &mut engine,
                &mut params,
                &mut collocation,
                &boundary,
                &rounds,
                sampler_seed,
            )?;
            for report in reports {
                training_time += report.wall_seconds;
                offset = stitch(&mut history, offset, &report.history);
                if let (None, Some(msg)) = (&aborted, report.aborted) {
                    aborted = Some(format!("round training: {msg}"));
                }
            }
            (result, false)
        }
    };
    let added_points = sampler_out.points.clone();
    let scores = sampler_out.scores.clone();
    let sampling_time = sampler_out.sampling_seconds;
    let episodes_used = sampler_out.episodes_used;

    // phase 3: final training on the enriched set (uniform trains the same
    // total budget the baselines spend across rounds)
    if needs_final_training {
        collocation.extend(sampler_out.points);
        let (iters, lbfgs_iters) = match cfg.sampler {
            SamplerId::Uniform => (
                cfg.t_max * cfg.per_round_iters,
                cfg.t_max * cfg.per_round_lbfgs_iters,
            ),
            _ => (cfg.final_iters, cfg.final_lbfgs_iters),
        };
        let final_cfg = TrainConfig {
            iterations: iters,
            lbfgs_iterations: lbfgs_iters,
            learning_rate: cfg.pinn_lr,
            weights: cfg.weights,
            record_every: (iters / 200).max(1),
        };
        let report =
            train(&problem, &mut engine, &mut params, &collocation, &boundary, &final_cfg)?;
        training_time += report.wall_seconds;
        stitch(&mut history, offset, &report.history);
        if let (None, Some(msg)) = (&aborted, report.aborted) {
            aborted = Some(format!("final training: {msg}"));
        }
    }

    // evaluate
    let test = build_test_set(&problem, derive_seed(cfg.seed, Stream::TestSet));
    let predicted = predict(&mlp, &params, &test)?;
    let rel_l2 = relative_l2(&predicted, &test.exact)?;

    let record = RunRecord {
        case: cfg.case.name().to_string(),
        sampler: cfg.sampler.name().to_string(),
        seed: cfg.seed,
        points_added: added_points.len(),
        sampling_time_s: sampling_time,
        training_time_s: training_time,
        rel_l2,
        episodes_used,
    };
    let artifacts = Artifacts {
        added_points,
        scores,
        history,
        mlp,
        params,
        aborted,
    };
    Ok((record, artifacts))
}
