//! Limited-memory BFGS with two-loop recursion and Armijo backtracking.

use std::collections::VecDeque;

use crate::{Error, Result};

#[derive(Debug, Clone)]
struct HistoryPair {
    s: Vec<f64>,
    y: Vec<f64>,
    rho: f64,
}

#[derive(Debug, Clone)]
pub struct LbfgsState {
    history: VecDeque<HistoryPair>,
    capacity: usize,
    pub armijo_c: f64,
    pub backtrack: f64,
    pub max_trials: usize,
    pub initial_step: f64,
    /// Set when the most recent step fell back to steepest descent.
    pub last_step_was_fallback: bool,
    prev: Option<(Vec<f64>, Vec<f64>)>,
}

impl LbfgsState {
    pub fn new(capacity: usize) -> Self {
        Self {
            history: VecDeque::with_capacity(capacity),
            capacity,
            armijo_c: 1e-4,
            backtrack: 0.5,
            max_trials: 20,
            initial_step: 1.0,
            last_step_was_fallback: false,
            prev: None,
        }
    }

    pub fn history_len(&self) -> usize {
        self.history.len()
    }

    /// Two-loop recursion: approximate H·g.
    fn direction(&self, grad: &[f64]) -> Vec<f64> {
        let mut q = grad.to_vec();
        let mut alphas = Vec::with_capacity(self.history.len());
        for pair in self.history.iter().rev() {
            let alpha = pair.rho * dot(&pair.s, &q);
            for (qi, yi) in q.iter_mut().zip(&pair.y) {
                *qi -= alpha * yi;
            }
            alphas.push(alpha);
        }
        if let Some(last) = self.history.back() {
            let gamma = dot(&last.s, &last.y) / dot(&last.y, &last.y);
            for qi in q.iter_mut() {
                *qi *= gamma;
            }
        }
        for (pair, alpha) in self.history.iter().zip(alphas.iter().rev()) {
            let beta = pair.rho * dot(&pair.y, &q);
            for (qi, si) in q.iter_mut().zip(&pair.s) {
                *qi += (alpha - beta) * si;
            }
        }
        q
    }

    fn record(&mut self, s: Vec<f64>, y: Vec<f64>) {
        let sy = dot(&s, &y);
        let s_norm = norm(&s);
        let y_norm = norm(&y);
        // keep only pairs with solidly positive curvature
        if sy > 1e-10 * s_norm * y_norm {
            if self.history.len() == self.capacity {
                self.history.pop_front();
            }
            self.history.push_back(HistoryPair { rho: 1.0 / sy, s, y });
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Armijo backtracking with forward tracking: if the initial step passes
/// immediately, double while both the Armijo bound and monotone decrease
/// hold, returning the largest acceptable step.
fn line_search<F>(
    params: &[f64],
    f0: f64,
    dir: &[f64],
    slope: f64,
    state: &LbfgsState,
    eval: &mut F,
) -> Option<(f64, Vec<f64>)>
where
    F: FnMut(&[f64]) -> (f64, Vec<f64>),
{
    let at = |step: f64, eval: &mut F| -> (f64, Vec<f64>) {
        let candidate: Vec<f64> = params.iter().zip(dir).map(|(p, d)| p + step * d).collect();
        let (f, _) = eval(&candidate);
        (f, candidate)
    };
    let armijo = |f: f64, step: f64| f.is_finite() && f <= f0 + state.armijo_c * step * slope;

    let mut step = state.initial_step;
    let (mut f, mut point) = at(step, eval);
    if armijo(f, step) {
        // forward tracking; the stale-scaling failure mode of Armijo-only
        // L-BFGS is a tiny quasi-Newton direction accepted at step 1 forever
        for _ in 0..state.max_trials {
            let bigger = step * 2.0;
            let (f_big, p_big) = at(bigger, eval);
            if armijo(f_big, bigger) && f_big < f {
                step = bigger;
                f = f_big;
                point = p_big;
            } else {
                break;
            }
        }
        return Some((f, point));
    }
    for _ in 0..state.max_trials {
        step *= state.backtrack;
        let (f_try, p_try) = at(step, eval);
        if armijo(f_try, step) {
            return Some((f_try, p_try));
        }
    }
    None
}

/// One L-BFGS update: direction by two-loop recursion, Armijo line search
/// with forward tracking, curvature-guarded history update. When the search
/// direction fails to produce Armijo decrease, the step falls back to
/// steepest descent (flagged in the state); at a stationary point the
/// parameters do not move.
pub fn lbfgs_step<F>(state: &mut LbfgsState, params: &mut [f64], mut eval: F) -> Result<f64>
where
    F: FnMut(&[f64]) -> (f64, Vec<f64>),
{
    let (f0, g0) = eval(params);
    if !f0.is_finite() || g0.iter().any(|g| !g.is_finite()) {
        return Err(Error::NonFinite { context: "lbfgs evaluation".into() });
    }
    state.last_step_was_fallback = false;

    let g_norm = norm(&g0);
    if g_norm == 0.0 {
        state.prev = Some((params.to_vec(), g0));
        return Ok(f0);
    }

    let mut dir: Vec<f64> = state.direction(&g0).iter().map(|d| -d).collect();
    let mut slope = dot(&g0, &dir);
    if slope >= 0.0 {
        // not a descent direction; discard and go downhill
        dir = g0.iter().map(|g| -g).collect();
        slope = -g_norm * g_norm;
        state.last_step_was_fallback = true;
    }

    let accepted = match line_search(params, f0, &dir, slope, state, &mut eval) {
        Some(hit) => Some(hit),
        None if !state.last_step_was_fallback => {
            // quasi-Newton direction failed the search: steepest descent
            state.last_step_was_fallback = true;
            let sd: Vec<f64> = g0.iter().map(|g| -g / g_norm).collect();
            line_search(params, f0, &sd, -g_norm, state, &mut eval)
        }
        None => None,
    };

    let Some((_, new_params)) = accepted else {
        // no acceptable step at all: stay put rather than increase the loss
        state.last_step_was_fallback = true;
        state.prev = Some((params.to_vec(), g0));
        return Ok(f0);
    };

    let (f_new, g_new) = eval(&new_params);
    let s: Vec<f64> = new_params.iter().zip(params.iter()).map(|(a, b)| a - b).collect();
    let y: Vec<f64> = g_new.iter().zip(&g0).map(|(a, b)| a - b).collect();
    state.record(s, y);
    params.copy_from_slice(&new_params);
    state.prev = Some((new_params, g_new));
    Ok(f_new)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_quadratic_converges_fast() {
        // ½ θᵀ diag(1,10) θ from (1,1): loss below 1e-10 within 10 iterations
        let eval = |p: &[f64]| {
            let f = 0.5 * (p[0] * p[0] + 10.0 * p[1] * p[1]);
            (f, vec![p[0], 10.0 * p[1]])
        };
        let mut state = LbfgsState::new(10);
        let mut p = vec![1.0, 1.0];
        let mut loss = f64::INFINITY;
        for _ in 0..10 {
            loss = lbfgs_step(&mut state, &mut p, eval).unwrap();
        }
        assert!(loss < 1e-10, "loss {loss}");
    }

    #[test]
    fn stationary_point_does_not_move() {
        let eval = |p: &[f64]| (p[0] * p[0], vec![2.0 * p[0]]);
        let mut state = LbfgsState::new(10);
        let mut p = vec![0.0];
        let loss = lbfgs_step(&mut state, &mut p, eval).unwrap();
        assert_eq!(loss, 0.0);
        assert_eq!(p, vec![0.0]);
    }

    #[test]
    fn rosenbrock_from_classic_start() {
        let eval = |p: &[f64]| {
            let (x, y) = (p[0], p[1]);
            let f = (1.0 - x).powi(2) + 100.0 * (y - x * x).powi(2);
            let gx = -2.0 * (1.0 - x) - 400.0 * x * (y - x * x);
            let gy = 200.0 * (y - x * x);
            (f, vec![gx, gy])
        };
        let mut state = LbfgsState::new(10);
        let mut p = vec![-1.2, 1.0];
        let mut loss = f64::INFINITY;
        for _ in 0..200 {
            loss = lbfgs_step(&mut state, &mut p, eval).unwrap();
            if loss < 1e-6 {
                break;
            }
        }
        assert!(loss < 1e-6, "loss {loss} at {p:?}");
    }

    // Armijo: an accepted step never increases the loss.
    #[test]
    fn accepted_steps_never_increase_loss() {
        let eval = |p: &[f64]| {
            let f = (p[0] - 0.3).powi(4) + (p[1] + 0.7).powi(2) + (p[0] * p[1]).sin();
            let gx = 4.0 * (p[0] - 0.3).powi(3) + p[1] * (p[0] * p[1]).cos();
            let gy = 2.0 * (p[1] + 0.7) + p[0] * (p[0] * p[1]).cos();
            (f, vec![gx, gy])
        };
        let mut state = LbfgsState::new(10);
        let mut p = vec![2.0, -3.0];
        let mut prev = eval(&p).0;
        for _ in 0..50 {
            let loss = lbfgs_step(&mut state, &mut p, eval).unwrap();
            assert!(loss <= prev + 1e-15, "{loss} > {prev}");
            prev = loss;
        }
    }

    #[test]
    fn deterministic_given_identical_inputs() {
        let eval = |p: &[f64]| {
            let f = (p[0] * p[0] - 1.0).powi(2) + p[1] * p[1];
            (
                f,
                vec![4.0 * p[0] * (p[0] * p[0] - 1.0), 2.0 * p[1]],
            )
        };
        let run = || {
            let mut state = LbfgsState::new(5);
            let mut p = vec![0.7, -0.4];
            for _ in 0..20 {
                lbfgs_step(&mut state, &mut p, eval).unwrap();
            }
            p
        };
        assert_eq!(run(), run());
    }
}
