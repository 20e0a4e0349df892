//! Physics-informed neural network training with adaptive collocation
//! sampling, plus the benchmark harness that compares sampling strategies
//! (uniform, residual-based refinement/distribution, and a DQN-guided
//! single-round sampler) on a fixed set of PDE cases.

pub mod deriv;
pub mod error;
pub mod harness;
pub mod network;
pub mod optim;
pub mod pinn;
pub mod problems;
pub mod rng;
pub mod samplers;
pub mod validate;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
