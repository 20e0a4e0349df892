//! DQN-guided single-round sampler.
//!
//! The agent walks the domain on a ±Δ lattice; the reward is the variation
//! of the frozen surrogate between consecutive positions, zeroed below the
//! threshold ε. The Q-network trains off a FIFO replay buffer, one
//! mini-batch gradient step per episode, with a target network synchronized
//! every `sync_every` episodes. Sampling stops once the high-variation
//! fraction stays at or above one half for `patience` consecutive episodes,
//! and returns the deduplicated thresholded buffer contents.

use std::collections::HashSet;
use std::time::Instant;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::network::trace::{backward_scalar_traced, forward_scalar_traced, ScalarWorkspace};
use crate::network::{forward_scalar1, init_params, Activation, MlpSpec, ParamVector};
use crate::optim::{adam_step, AdamState};
use crate::problems::{Domain, ProblemSpec};
use crate::rng::{derive_seed, seeded_rng, Stream};
use crate::{Error, Result};

use super::replay::{ReplayBuffer, Transition};
use super::SamplerResult;

/// Frozen solution evaluator the reward reads from.
pub trait Surrogate: Sync {
    fn eval(&self, x: &[f64]) -> f64;
}

/// Network-backed surrogate.
pub struct NetSurrogate<'a> {
    pub spec: &'a MlpSpec,
    pub params: &'a ParamVector,
}

impl Surrogate for NetSurrogate<'_> {
    fn eval(&self, x: &[f64]) -> f64 {
        forward_scalar1(self.spec, self.params, x).expect("surrogate evaluation")
    }
}

/// Closure-backed surrogate, for synthetic fields.
pub struct FnSurrogate<F: Fn(&[f64]) -> f64 + Sync>(pub F);

impl<F: Fn(&[f64]) -> f64 + Sync> Surrogate for FnSurrogate<F> {
    fn eval(&self, x: &[f64]) -> f64 {
        (self.0)(x)
    }
}

#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct RlConfig {
    /// Function-variation threshold ε.
    pub epsilon_threshold: f64,
    /// Lattice displacement per action.
    pub action_step: f64,
    /// Maximum episodes N.
    pub episodes_max: usize,
    /// Steps per episode T.
    pub steps_per_episode: usize,
    /// Replay capacity 𝒫.
    pub buffer_capacity: usize,
    pub gamma: f64,
    /// Target-network sync period K.
    pub sync_every: usize,
    /// Consecutive high-variation episodes required to stop.
    pub patience: usize,
    pub dqn_batch: usize,
    pub q_lr: f64,
    pub q_hidden: Vec<usize>,
    /// Per-axis range the episode start state is drawn from.
    pub initial_state: Vec<(f64, f64)>,
}

impl RlConfig {
    pub fn validate(&self, dimension: usize) -> Result<()> {
        let positive = self.epsilon_threshold > 0.0
            && self.action_step > 0.0
            && self.episodes_max > 0
            && self.steps_per_episode > 0
            && self.buffer_capacity > 0
            && self.sync_every > 0
            && self.patience > 0
            && self.dqn_batch > 0
            && self.q_lr > 0.0;
        if !positive {
            return Err(Error::InvalidConfig("rl config fields must be positive".into()));
        }
        if !(0.0..1.0).contains(&self.gamma) {
            return Err(Error::InvalidConfig("gamma must lie in [0, 1)".into()));
        }
        if self.initial_state.len() != dimension {
            return Err(Error::InvalidConfig(format!(
                "initial-state ranges cover {} axes, problem has {dimension}",
                self.initial_state.len()
            )));
        }
        if self.q_hidden.is_empty() {
            return Err(Error::InvalidConfig("q-network needs hidden layers".into()));
        }
        Ok(())
    }
}

/// Exploration probability for episode n (1-based): 0.5/n, capped at 1.
pub fn rl_epsilon(episode: usize) -> Result<f64> {
    if episode == 0 {
        return Err(Error::EmptyInput { context: "episode index".into() });
    }
    Ok((0.5 / episode as f64).min(1.0))
}

/// Deterministic transition: displace along one axis, clamped to the box.
/// Actions pair up as {+Δ, −Δ} per axis: action 2a is +Δ on axis a.
pub fn rl_step(state: &[f64], action: usize, step: f64, domain: &Domain) -> Result<Vec<f64>> {
    let n_actions = 2 * state.len();
    if action >= n_actions {
        return Err(Error::InvalidAction { index: action, n_actions });
    }
    let axis = action / 2;
    let sign = if action % 2 == 0 { 1.0 } else { -1.0 };
    let mut next = state.to_vec();
    next[axis] += sign * step;
    domain.clamp(&mut next);
    Ok(next)
}

/// Semi-sparse reward: (reward, δu) with reward = δu iff δu ≥ ε.
pub fn compute_reward(u_prev: f64, u_next: f64, epsilon: f64) -> (f64, f64) {
    let delta_u = (u_next - u_prev).abs();
    let reward = if delta_u >= epsilon { delta_u } else { 0.0 };
    (reward, delta_u)
}

/// Fraction of an episode's transitions with δu ≥ ε.
pub fn episode_ratio(delta_us: &[f64], epsilon: f64) -> Result<f64> {
    if delta_us.is_empty() {
        return Err(Error::EmptyInput { context: "episode ratio".into() });
    }
    let high = delta_us.iter().filter(|&&d| d >= epsilon).count();
    Ok(high as f64 / delta_us.len() as f64)
}

/// Consecutive-success counter: stop after `patience` episodes in a row
/// with ratio ≥ 1/2.
#[derive(Debug, Clone)]
pub struct TerminationTracker {
    streak: usize,
    patience: usize,
}

impl TerminationTracker {
    pub fn new(patience: usize) -> Self {
        Self { streak: 0, patience }
    }

    /// Feed one episode's ratio; true means stop.
    pub fn observe(&mut self, ratio: f64) -> bool {
        if ratio >= 0.5 {
            self.streak += 1;
        } else {
            self.streak = 0;
        }
        self.streak >= self.patience
    }

    pub fn streak(&self) -> usize {
        self.streak
    }
}

/// Bellman targets y = R + γ·max_a' Q_tar(x', a') for a sampled batch.
pub fn bellman_targets(
    q_spec: &MlpSpec,
    target_params: &ParamVector,
    batch: &[&Transition],
    gamma: f64,
) -> Result<Vec<f64>> {
    let mut ws = ScalarWorkspace::new(q_spec);
    let mut targets = Vec::with_capacity(batch.len());
    for tr in batch {
        forward_scalar_traced(q_spec, target_params, &tr.next_state, &mut ws);
        let max_q = ws.output().iter().copied().fold(f64::NEG_INFINITY, f64::max);
        targets.push(tr.reward + gamma * max_q);
    }
    Ok(targets)
}

/// One DQN update: a uniform with-replacement mini-batch, targets from the
/// frozen target network, a single Adam step on the mean squared Bellman
/// error. Returns the batch loss. The target network is untouched.
pub fn dqn_update(
    q_spec: &MlpSpec,
    q_params: &mut ParamVector,
    target_params: &ParamVector,
    buffer: &ReplayBuffer,
    batch_size: usize,
    gamma: f64,
    adam: &mut AdamState,
    rng: &mut ChaCha8Rng,
) -> Result<f64> {
    if buffer.is_empty() {
        return Err(Error::EmptyInput { context: "replay buffer".into() });
    }
    let batch: Vec<&Transition> =
        (0..batch_size).map(|_| buffer.get(rng.gen_range(0..buffer.len()))).collect();
    let targets = bellman_targets(q_spec, target_params, &batch, gamma)?;

    let mut ws = ScalarWorkspace::new(q_spec);
    let mut grad = vec![0.0; q_params.len()];
    let mut adjoint = vec![0.0; q_spec.output_dim];
    let mut loss = 0.0;
    for (tr, &y) in batch.iter().zip(&targets) {
        forward_scalar_traced(q_spec, q_params, &tr.state, &mut ws);
        let q_a = ws.output()[tr.action];
        let diff = q_a - y;
        loss += diff * diff;
        adjoint.fill(0.0);
        adjoint[tr.action] = 2.0 * diff / batch_size as f64;
        backward_scalar_traced(q_spec, q_params, &adjoint, &mut ws, &mut grad);
    }
    adam_step(adam, &mut q_params.values, &grad)?;
    Ok(loss / batch_size as f64)
}

fn greedy_action(q_spec: &MlpSpec, q: &ParamVector, state: &[f64], ws: &mut ScalarWorkspace) -> usize {
    forward_scalar_traced(q_spec, q, state, ws);
    let out = ws.output();
    let mut best = 0;
    for (i, &v) in out.iter().enumerate().skip(1) {
        if v > out[best] {
            best = i;
        }
    }
    best
}

/// Run the full sampling loop against a frozen surrogate. Deterministic per
/// (config, seed). Returns the deduplicated states of buffered transitions
/// with δu ≥ ε, each tagged with its first-seen δu.
pub fn rl_run(
    problem: &ProblemSpec,
    surrogate: &dyn Surrogate,
    cfg: &RlConfig,
    seed: u64,
) -> Result<SamplerResult> {
    cfg.validate(problem.dimension)?;
    let start = Instant::now();
    let dim = problem.dimension;
    let n_actions = 2 * dim;
    let q_spec = MlpSpec::new(dim, cfg.q_hidden.clone(), n_actions, Activation::Relu)?;
    let mut q = init_params(&q_spec, derive_seed(seed, Stream::QNetworkInit));
    let mut q_target = q.clone();
    let mut adam = AdamState::new(q.len(), cfg.q_lr);
    let mut rollout_rng = seeded_rng(derive_seed(seed, Stream::MdpRollout));
    let mut batch_rng = seeded_rng(derive_seed(seed, Stream::DqnBatch));
    let mut ws = ScalarWorkspace::new(&q_spec);

    let mut buffer = ReplayBuffer::new(cfg.buffer_capacity);
    let mut tracker = TerminationTracker::new(cfg.patience);
    let mut episodes_used = 0;
    let mut delta_us = Vec::with_capacity(cfg.steps_per_episode);

    for episode in 1..=cfg.episodes_max {
        episodes_used = episode;
        let mut state: Vec<f64> = cfg
            .initial_state
            .iter()
            .map(|(lo, hi)| lo + (hi - lo) * rollout_rng.gen::<f64>())
            .collect();
        problem.domain.clamp(&mut state);
        let mut u_prev = surrogate.eval(&state);

        delta_us.clear();
        let explore_p = rl_epsilon(episode)?;
        for _ in 0..cfg.steps_per_episode {
            let action = if rollout_rng.gen::<f64>() < explore_p {
                rollout_rng.gen_range(0..n_actions)
            } else {
                greedy_action(&q_spec, &q, &state, &mut ws)
            };
            let next_state = rl_step(&state, action, cfg.action_step, &problem.domain)?;
            let u_next = surrogate.eval(&next_state);
            let (reward, delta_u) = compute_reward(u_prev, u_next, cfg.epsilon_threshold);
            delta_us.push(delta_u);
            buffer.push(Transition {
                state: state.clone(),
                action,
                reward,
                next_state: next_state.clone(),
                delta_u,
            });
            state = next_state;
            u_prev = u_next;
        }

        let ratio = episode_ratio(&delta_us, cfg.epsilon_threshold)?;
        let done = tracker.observe(ratio);
        dqn_update(
            &q_spec,
            &mut q,
            &q_target,
            &buffer,
            cfg.dqn_batch,
            cfg.gamma,
            &mut adam,
            &mut batch_rng,
        )?;
        if episode % cfg.sync_every == 0 {
            q_target = q.clone();
        }
        if done {
            break;
        }
    }

    // thresholded, exactly-deduplicated buffer contents in first-seen order
    let mut seen: HashSet<Vec<u64>> = HashSet::new();
    let mut points = Vec::new();
    let mut scores = Vec::new();
    for tr in buffer.iter() {
        if tr.delta_u >= cfg.epsilon_threshold {
            let key: Vec<u64> = tr.state.iter().map(|v| v.to_bits()).collect();
            if seen.insert(key) {
                points.push(tr.state.clone());
                scores.push(tr.delta_u);
            }
        }
    }
    if points.is_empty() {
        return Err(Error::NoHighVariationPoints { epsilon: cfg.epsilon_threshold });
    }
    Ok(SamplerResult {
        points,
        scores: Some(scores),
        sampling_seconds: start.elapsed().as_secs_f64(),
        episodes_used: Some(episodes_used),
        per_round_counts: Vec::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::make_single_peak;
    use approx::assert_relative_eq;

    // sparse-reward surrogates need the buffer to retain the whole run,
    // or the rare reward transitions are evicted before the single
    // per-episode update can use them
    fn desk_config() -> RlConfig {
        RlConfig {
            epsilon_threshold: 0.005,
            action_step: 0.1,
            episodes_max: 40,
            steps_per_episode: 200,
            buffer_capacity: 8000,
            gamma: 0.95,
            sync_every: 5,
            patience: 5,
            dqn_batch: 64,
            q_lr: 3e-3,
            q_hidden: vec![128, 64],
            initial_state: vec![(-0.1, 0.1), (-0.1, 0.1)],
        }
    }

    #[test]
    fn epsilon_schedule_values() {
        assert_eq!(rl_epsilon(1).unwrap(), 0.5);
        assert_eq!(rl_epsilon(2).unwrap(), 0.25);
        assert_relative_eq!(rl_epsilon(50).unwrap(), 0.01);
        assert!(rl_epsilon(0).is_err());
    }

    #[test]
    fn step_examples() {
        let domain = Domain::new(vec![(-1.0, 1.0), (-1.0, 1.0)]);
        // +Δ on axis 0
        let next = rl_step(&[0.3, 0.3], 0, 0.1, &domain).unwrap();
        assert_relative_eq!(next[0], 0.4);
        assert_relative_eq!(next[1], 0.3);
        // clamped at the face
        let clamped = rl_step(&[0.95, 0.0], 0, 0.1, &domain).unwrap();
        assert_eq!(clamped, vec![1.0, 0.0]);
        // +Δ then −Δ returns home in the interior
        let there = rl_step(&[0.3, 0.3], 0, 0.1, &domain).unwrap();
        let back = rl_step(&there, 1, 0.1, &domain).unwrap();
        assert_relative_eq!(back[0], 0.3, epsilon = 1e-15);
        // invalid action index
        assert!(matches!(
            rl_step(&[0.0, 0.0], 4, 0.1, &domain),
            Err(Error::InvalidAction { index: 4, n_actions: 4 })
        ));
    }

    #[test]
    fn reward_branches() {
        assert_eq!(compute_reward(0.0, 0.006, 0.005), (0.006, 0.006));
        assert_eq!(compute_reward(0.0, 0.004, 0.005), (0.0, 0.004));
        // inclusive threshold
        assert_eq!(compute_reward(0.0, 0.005, 0.005), (0.005, 0.005));
    }

    #[test]
    fn episode_ratio_examples() {
        assert_eq!(episode_ratio(&[0.2, 0.0, 0.3, 0.1], 0.15).unwrap(), 0.5);
        assert_eq!(episode_ratio(&[0.01, 0.02], 0.15).unwrap(), 0.0);
        assert_eq!(episode_ratio(&[0.15, 0.15], 0.15).unwrap(), 1.0);
        assert!(episode_ratio(&[], 0.1).is_err());
    }

    // the documented ratio sequence terminates after the 8th episode
    #[test]
    fn termination_counter_sequence() {
        let mut tracker = TerminationTracker::new(5);
        let ratios = [0.6, 0.6, 0.4, 0.6, 0.6, 0.6, 0.6, 0.6];
        let mut stopped_at = None;
        for (i, &r) in ratios.iter().enumerate() {
            if tracker.observe(r) {
                stopped_at = Some(i + 1);
                break;
            }
        }
        assert_eq!(stopped_at, Some(8));
    }

    #[test]
    fn bellman_target_example() {
        // target net: zero weights, output biases {2, 0, -1, 0.5} → max 2
        let q_spec = MlpSpec::new(2, vec![4], 4, Activation::Relu).unwrap();
        let mut target = ParamVector::zeros(&q_spec);
        let out_layer = target.layers()[1];
        for (i, b) in [2.0, 0.0, -1.0, 0.5].iter().enumerate() {
            target.values[out_layer.b_offset + i] = *b;
        }
        let tr = Transition {
            state: vec![0.0, 0.0],
            action: 1,
            reward: 1.0,
            next_state: vec![0.2, 0.1],
            delta_u: 1.0,
        };
        let y = bellman_targets(&q_spec, &target, &[&tr], 0.95).unwrap();
        assert_relative_eq!(y[0], 2.9, max_relative = 1e-15);

        // discount-free targets equal rewards
        let y0 = bellman_targets(&q_spec, &ParamVector::zeros(&q_spec), &[&tr], 0.0).unwrap();
        assert_eq!(y0[0], 1.0);
    }

    #[test]
    fn dqn_update_single_transition_buffer_is_deterministic() {
        let q_spec = MlpSpec::new(2, vec![8], 4, Activation::Relu).unwrap();
        let mut buffer = ReplayBuffer::new(16);
        buffer.push(Transition {
            state: vec![0.1, -0.2],
            action: 2,
            reward: 0.4,
            next_state: vec![0.2, -0.2],
            delta_u: 0.4,
        });
        let run = || {
            let mut q = init_params(&q_spec, 3);
            let target = q.clone();
            let mut adam = AdamState::new(q.len(), 1e-3);
            let mut rng = crate::rng::seeded_rng(4);
            let loss = dqn_update(&q_spec, &mut q, &target, &buffer, 4, 0.95, &mut adam, &mut rng)
                .unwrap();
            (loss, q.values)
        };
        let (l1, q1) = run();
        let (l2, q2) = run();
        assert_eq!(l1, l2);
        assert_eq!(q1, q2);
        assert!(l1 > 0.0);
    }

    #[test]
    fn rl_run_on_sharp_bump_surrogate() {
        let problem = make_single_peak();
        // analytic bump at (0.5, 0.5): variation only matters near it
        let surrogate = FnSurrogate(|x: &[f64]| {
            let dx = x[0] - 0.5;
            let dy = x[1] - 0.5;
            (-500.0 * (dx * dx + dy * dy)).exp()
        });
        let cfg = desk_config();
        let result = rl_run(&problem, &surrogate, &cfg, 2).unwrap();

        // every returned point had δu ≥ ε and lies inside the domain
        assert!(result.points.len() <= cfg.buffer_capacity);
        let scores = result.scores.as_ref().unwrap();
        assert!(scores.iter().all(|&s| s >= cfg.epsilon_threshold));
        assert!(result.points.iter().all(|p| problem.domain.contains(p)));
        assert!(result.episodes_used.unwrap() <= cfg.episodes_max);

        // determinism
        let again = rl_run(&problem, &surrogate, &cfg, 2).unwrap();
        assert_eq!(result.points, again.points);

        let different = rl_run(&problem, &surrogate, &cfg, 4).unwrap();
        assert_ne!(result.points, different.points);
    }

    #[test]
    fn rl_run_fails_cleanly_when_nothing_varies() {
        let problem = make_single_peak();
        let flat = FnSurrogate(|_: &[f64]| 0.25);
        let cfg = RlConfig { episodes_max: 3, ..desk_config() };
        let err = rl_run(&problem, &flat, &cfg, 0).unwrap_err();
        assert!(matches!(err, Error::NoHighVariationPoints { .. }));
    }
}
