//! Parameter updaters: Adam everywhere, L-BFGS fine-tuning where a training
//! plan asks for it.

pub mod adam;
pub mod lbfgs;

pub use adam::{adam_step, AdamState};
pub use lbfgs::{lbfgs_step, LbfgsState};
