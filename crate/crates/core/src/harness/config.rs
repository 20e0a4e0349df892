//! Per-case configuration. Built-in defaults carry each benchmark's
//! training and sampling table rows; a JSON file and then CLI flags overlay
//! them, in that order.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::pinn::LossWeights;
use crate::problems::{self, ProblemSpec};
use crate::samplers::RlConfig;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CaseId {
    SinglePeak,
    DualPeak,
    Burgers,
    Wave,
    HighDimension,
    Biharmonic,
}

pub const ALL_CASES: [CaseId; 6] = [
    CaseId::SinglePeak,
    CaseId::DualPeak,
    CaseId::Burgers,
    CaseId::Wave,
    CaseId::HighDimension,
    CaseId::Biharmonic,
];

impl CaseId {
    pub fn name(self) -> &'static str {
        match self {
            CaseId::SinglePeak => "single-peak",
            CaseId::DualPeak => "dual-peak",
            CaseId::Burgers => "burgers",
            CaseId::Wave => "wave",
            CaseId::HighDimension => "high-dimension",
            CaseId::Biharmonic => "biharmonic",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        let canon = s.trim().to_lowercase().replace('_', "-");
        for case in ALL_CASES {
            if case.name() == canon {
                return Ok(case);
            }
        }
        match canon.as_str() {
            "high-dim" | "highdim" => Ok(CaseId::HighDimension),
            "high-order" => Ok(CaseId::Biharmonic),
            _ => Err(Error::UnknownCase {
                got: s.to_string(),
                valid: ALL_CASES.map(CaseId::name).join(", "),
            }),
        }
    }

    pub fn build(self) -> ProblemSpec {
        match self {
            CaseId::SinglePeak => problems::make_single_peak(),
            CaseId::DualPeak => problems::make_dual_peak(),
            CaseId::Burgers => problems::make_burgers(),
            CaseId::Wave => problems::make_wave(),
            CaseId::HighDimension => problems::make_highdim(),
            CaseId::Biharmonic => problems::make_biharmonic(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SamplerId {
    Uniform,
    Rar,
    Rad,
    Rl,
}

pub const ALL_SAMPLERS: [SamplerId; 4] =
    [SamplerId::Uniform, SamplerId::Rar, SamplerId::Rad, SamplerId::Rl];

impl SamplerId {
    pub fn name(self) -> &'static str {
        match self {
            SamplerId::Uniform => "uniform",
            SamplerId::Rar => "rar",
            SamplerId::Rad => "rad",
            SamplerId::Rl => "rl",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.trim().to_lowercase().as_str() {
            "uniform" => Ok(SamplerId::Uniform),
            "rar" => Ok(SamplerId::Rar),
            "rad" => Ok(SamplerId::Rad),
            "rl" => Ok(SamplerId::Rl),
            _ => Err(Error::UnknownSampler {
                got: s.to_string(),
                valid: ALL_SAMPLERS.map(SamplerId::name).join(", "),
            }),
        }
    }
}

/// Fully resolved run settings.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub case: CaseId,
    pub sampler: SamplerId,
    pub seed: u64,
    pub hidden: Vec<usize>,
    pub pinn_lr: f64,
    /// Initial collocation count.
    pub n_r0: usize,
    pub pretrain_iters: usize,
    pub t_max: usize,
    /// Candidate pool size per baseline round.
    pub s0: usize,
    /// Points added per baseline round.
    pub s_per_round: usize,
    pub per_round_iters: usize,
    pub per_round_lbfgs_iters: usize,
    pub final_iters: usize,
    pub final_lbfgs_iters: usize,
    pub n_b: usize,
    pub weights: LossWeights,
    pub rl: RlConfig,
    pub out_dir: PathBuf,
}

impl RunConfig {
    /// Built-in defaults for a case: learning-rate / point-budget /
    /// iteration rows plus the sampler table (initial state, ε, step,
    /// buffer capacity).
    pub fn defaults(case: CaseId) -> Self {
        let (pinn_lr, n_r0, pretrain_iters, s0, s_per_round) = match case {
            CaseId::SinglePeak => (1e-4, 5000, 5000, 1000, 200),
            CaseId::DualPeak => (1e-4, 5000, 5000, 2000, 400),
            CaseId::Burgers => (1e-3, 5000, 5000, 1000, 200),
            CaseId::Wave => (1e-3, 10_000, 10_000, 2000, 400),
            CaseId::HighDimension => (1e-3, 10_000, 10_000, 5000, 1000),
            CaseId::Biharmonic => (5e-5, 2000, 5000, 1000, 200),
        };
        let (lbfgs_per_round, lbfgs_final) = match case {
            CaseId::Burgers => (5000, 25_000),
            _ => (0, 0),
        };
        let n_b = match case {
            CaseId::HighDimension => 1000,
            _ => 400,
        };
        let (epsilon, action_step, steps, capacity, initial_state) = match case {
            CaseId::SinglePeak => (0.005, 0.1, 200, 1000, vec![(-0.1, 0.1); 2]),
            CaseId::DualPeak => (0.01, 0.1, 400, 2000, vec![(-0.1, 0.1); 2]),
            CaseId::Burgers => (0.1, 0.1, 200, 1000, vec![(-0.1, 0.1), (0.0, 0.1)]),
            CaseId::Wave => (0.05, 0.2, 400, 2000, vec![(-0.5, 0.5), (0.0, 0.5)]),
            CaseId::HighDimension => (1e-4, 0.1, 1000, 5000, vec![(0.4, 0.6); 10]),
            CaseId::Biharmonic => (0.05, 0.1, 200, 1000, vec![(0.4, 0.6); 2]),
        };
        RunConfig {
            case,
            sampler: SamplerId::Uniform,
            seed: 0,
            hidden: vec![64, 128, 256, 512, 256, 128, 64],
            pinn_lr,
            n_r0,
            pretrain_iters,
            t_max: 5,
            s0,
            s_per_round,
            per_round_iters: 5000,
            per_round_lbfgs_iters: lbfgs_per_round,
            final_iters: 25_000,
            final_lbfgs_iters: lbfgs_final,
            n_b,
            weights: LossWeights::default(),
            rl: RlConfig {
                epsilon_threshold: epsilon,
                action_step,
                episodes_max: 100,
                steps_per_episode: steps,
                buffer_capacity: capacity,
                gamma: 0.95,
                sync_every: 5,
                patience: 5,
                dqn_batch: 64,
                q_lr: 1e-3,
                q_hidden: vec![128, 64],
                initial_state,
            },
            out_dir: PathBuf::from("out"),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = self.n_r0 > 0
            && self.pretrain_iters > 0
            && self.t_max > 0
            && self.s0 > 0
            && self.s_per_round > 0
            && self.per_round_iters > 0
            && self.final_iters > 0
            && self.n_b > 0
            && self.pinn_lr > 0.0;
        if !positive {
            return Err(Error::InvalidConfig("all counts and rates must be positive".into()));
        }
        if self.hidden.is_empty() || self.hidden.iter().any(|&h| h == 0) {
            return Err(Error::InvalidConfig("hidden sizes must be positive".into()));
        }
        if self.s_per_round > self.s0 {
            return Err(Error::InvalidConfig(
                "cannot keep more points per round than the candidate pool".into(),
            ));
        }
        LossWeights::new(self.weights.lambda_r, self.weights.lambda_b)?;
        let dim = match self.case {
            CaseId::HighDimension => 10,
            _ => 2,
        };
        self.rl.validate(dim)?;
        Ok(())
    }
}

/// Optional overlays parsed from the JSON config file. Unknown keys are
/// rejected so typos fail loudly.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub case: Option<String>,
    pub sampler: Option<String>,
    pub seed: Option<u64>,
    pub hidden: Option<Vec<usize>>,
    pub pinn_lr: Option<f64>,
    pub n_r0: Option<usize>,
    pub pretrain_iters: Option<usize>,
    pub t_max: Option<usize>,
    pub s0: Option<usize>,
    pub s: Option<usize>,
    pub per_round_iters: Option<usize>,
    pub per_round_lbfgs_iters: Option<usize>,
    pub final_iters: Option<usize>,
    pub final_lbfgs_iters: Option<usize>,
    pub n_b: Option<usize>,
    pub lambda_r: Option<f64>,
    pub lambda_b: Option<f64>,
    pub out_dir: Option<String>,
    pub rl: Option<FileRlConfig>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileRlConfig {
    pub epsilon: Option<f64>,
    pub action_step: Option<f64>,
    pub episodes_max: Option<usize>,
    pub steps_per_episode: Option<usize>,
    pub buffer_capacity: Option<usize>,
    pub gamma: Option<f64>,
    pub sync_every: Option<usize>,
    pub patience: Option<usize>,
    pub batch_size: Option<usize>,
    pub q_lr: Option<f64>,
    pub q_hidden: Option<Vec<usize>>,
    pub initial_state: Option<Vec<(f64, f64)>>,
}

/// Command-line overrides, applied last.
#[derive(Debug, Clone, Default)]
pub struct CliOverrides {
    pub case: Option<String>,
    pub sampler: Option<String>,
    pub seed: Option<u64>,
    pub out_dir: Option<PathBuf>,
}

pub fn read_file_config(path: &Path) -> Result<FileConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::ConfigFile(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| Error::ConfigFile(format!("{}: {e}", path.display())))
}

/// Resolve a run configuration: case defaults, then file values, then CLI
/// overrides, then validation.
pub fn load_config(file: Option<&FileConfig>, cli: &CliOverrides) -> Result<RunConfig> {
    let case_str = cli
        .case
        .clone()
        .or_else(|| file.and_then(|f| f.case.clone()))
        .ok_or_else(|| Error::InvalidConfig("no case given (config file or --case)".into()))?;
    let case = CaseId::parse(&case_str)?;
    let mut cfg = RunConfig::defaults(case);

    if let Some(f) = file {
        if let Some(s) = &f.sampler {
            cfg.sampler = SamplerId::parse(s)?;
        }
        if let Some(v) = f.seed {
            cfg.seed = v;
        }
        if let Some(v) = &f.hidden {
            cfg.hidden = v.clone();
        }
        if let Some(v) = f.pinn_lr {
            cfg.pinn_lr = v;
        }
        if let Some(v) = f.n_r0 {
            cfg.n_r0 = v;
        }
        if let Some(v) = f.pretrain_iters {
            cfg.pretrain_iters = v;
        }
        if let Some(v) = f.t_max {
            cfg.t_max = v;
        }
        if let Some(v) = f.s0 {
            cfg.s0 = v;
        }
        if let Some(v) = f.s {
            cfg.s_per_round = v;
        }
        if let Some(v) = f.per_round_iters {
            cfg.per_round_iters = v;
        }
        if let Some(v) = f.per_round_lbfgs_iters {
            cfg.per_round_lbfgs_iters = v;
        }
        if let Some(v) = f.final_iters {
            cfg.final_iters = v;
        }
        if let Some(v) = f.final_lbfgs_iters {
            cfg.final_lbfgs_iters = v;
        }
        if let Some(v) = f.n_b {
            cfg.n_b = v;
        }
        if let Some(v) = f.lambda_r {
            cfg.weights.lambda_r = v;
        }
        if let Some(v) = f.lambda_b {
            cfg.weights.lambda_b = v;
        }
        if let Some(v) = &f.out_dir {
            cfg.out_dir = PathBuf::from(v);
        }
        if let Some(rl) = &f.rl {
            if let Some(v) = rl.epsilon {
                cfg.rl.epsilon_threshold = v;
            }
            if let Some(v) = rl.action_step {
                cfg.rl.action_step = v;
            }
            if let Some(v) = rl.episodes_max {
                cfg.rl.episodes_max = v;
            }
            if let Some(v) = rl.steps_per_episode {
                cfg.rl.steps_per_episode = v;
            }
            if let Some(v) = rl.buffer_capacity {
                cfg.rl.buffer_capacity = v;
            }
            if let Some(v) = rl.gamma {
                cfg.rl.gamma = v;
            }
            if let Some(v) = rl.sync_every {
                cfg.rl.sync_every = v;
            }
            if let Some(v) = rl.patience {
                cfg.rl.patience = v;
            }
            if let Some(v) = rl.batch_size {
                cfg.rl.dqn_batch = v;
            }
            if let Some(v) = rl.q_lr {
                cfg.rl.q_lr = v;
            }
            if let Some(v) = &rl.q_hidden {
                cfg.rl.q_hidden = v.clone();
            }
            if let Some(v) = &rl.initial_state {
                cfg.rl.initial_state = v.clone();
            }
        }
    }

    if let Some(s) = &cli.sampler {
        cfg.sampler = SamplerId::parse(s)?;
    }
    if let Some(v) = cli.seed {
        cfg.seed = v;
    }
    if let Some(v) = &cli.out_dir {
        cfg.out_dir = v.clone();
    }

    cfg.validate()?;
    Ok(cfg)
}
