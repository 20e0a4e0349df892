//! Adam with bias correction.

use crate::{Error, Result};

#[derive(Debug, Clone)]
pub struct AdamState {
    pub m: Vec<f64>,
    pub v: Vec<f64>,
    pub step_count: u64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps_stab: f64,
    pub lr: f64,
}

impl AdamState {
    /// Fresh state with the usual defaults (β1=0.9, β2=0.999, ε=1e-8).
    pub fn new(n_params: usize, lr: f64) -> Self {
        Self {
            m: vec![0.0; n_params],
            v: vec![0.0; n_params],
            step_count: 0,
            beta1: 0.9,
            beta2: 0.999,
            eps_stab: 1e-8,
            lr,
        }
    }
}

/// One bias-corrected Adam update, in place.
pub fn adam_step(state: &mut AdamState, params: &mut [f64], gradient: &[f64]) -> Result<()> {
    if params.len() != state.m.len() || gradient.len() != state.m.len() {
        return Err(Error::DimensionMismatch { expected: state.m.len(), got: gradient.len() });
    }
    if gradient.iter().any(|g| !g.is_finite()) {
        return Err(Error::NonFinite { context: "adam gradient".into() });
    }
    state.step_count += 1;
    let t = state.step_count as i32;
    let bc1 = 1.0 - state.beta1.powi(t);
    let bc2 = 1.0 - state.beta2.powi(t);
    for i in 0..params.len() {
        let g = gradient[i];
        state.m[i] = state.beta1 * state.m[i] + (1.0 - state.beta1) * g;
        state.v[i] = state.beta2 * state.v[i] + (1.0 - state.beta2) * g * g;
        let m_hat = state.m[i] / bc1;
        let v_hat = state.v[i] / bc2;
        params[i] -= state.lr * m_hat / (v_hat.sqrt() + state.eps_stab);
    }
    Ok(())
}
