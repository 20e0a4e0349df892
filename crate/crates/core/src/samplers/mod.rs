//! Collocation-point selection strategies: uniform draws, residual-driven
//! multi-round baselines, and the DQN-guided single-round sampler.

pub mod replay;
pub mod residual_based;
pub mod rl;
pub mod uniform;

pub use replay::{ReplayBuffer, Transition};
pub use residual_based::{
    adaptive_rounds, rad_density, rar_select, residual_magnitudes,
    weighted_draw_without_replacement, RoundsConfig, Strategy,
};
pub use rl::{
    bellman_targets, compute_reward, dqn_update, episode_ratio, rl_epsilon, rl_run, rl_step,
    FnSurrogate, NetSurrogate, RlConfig, Surrogate, TerminationTracker,
};
pub use uniform::uniform_sample;

/// What a sampling strategy hands back to the pipeline.
#[derive(Debug, Clone)]
pub struct SamplerResult {
    pub points: Vec<Vec<f64>>,
    /// Residual magnitudes (refinement/distribution), δu (rl), or absent
    /// (uniform); aligned with `points`.
    pub scores: Option<Vec<f64>>,
    pub sampling_seconds: f64,
    /// Episodes consumed by the rl sampler.
    pub episodes_used: Option<usize>,
    /// Points kept per round for the multi-round baselines.
    pub per_round_counts: Vec<usize>,
}
