//! Derivative engine: jets carry input-derivatives to 4th order through
//! function evaluation; the tape provides parameter gradients of anything a
//! jet pipeline computes.

pub mod basis;
pub mod elem;
pub mod jet;
pub mod scalar;
pub mod tape;

pub use basis::{DerivativeBasis, MultiIndex, ProductEntry, MAX_ORDER};
pub use jet::{seed_coordinates, seed_coordinates_in, Jet};
pub use scalar::Scalar;
pub use tape::{OpKind, Tape, Var};
