use thiserror::Error;

/// Errors surfaced by the library. Contract violations that can only arise
/// from programmer error (e.g. mixing jets from different bases in operator
/// syntax) panic instead; everything data-dependent comes through here.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("jet basis mismatch between operands")]
    BasisMismatch,

    #[error("division by a jet with zero value")]
    DivisionByZero,

    #[error("invalid tape node id {0}")]
    InvalidNodeId(u32),

    #[error("multi-index order {order} exceeds the supported maximum {max}")]
    OrderTooHigh { order: usize, max: usize },

    #[error("derivative basis is not closed: missing sub-index {0:?}")]
    BasisNotClosed(Vec<u8>),

    #[error("relu activation is not differentiable enough for jet mode")]
    ReluInJetMode,

    #[error("non-finite value encountered in {context}")]
    NonFinite { context: String },

    #[error("{context}: count must be positive")]
    EmptyInput { context: String },

    #[error("selection size {m} exceeds candidate count {n}")]
    SelectionTooLarge { m: usize, n: usize },

    #[error("invalid action index {index} for {n_actions} actions")]
    InvalidAction { index: usize, n_actions: usize },

    #[error(
        "sampling terminated with zero high-variation points; \
         lower the variation threshold (currently {epsilon})"
    )]
    NoHighVariationPoints { epsilon: f64 },

    #[error("point {0:?} lies outside the problem domain")]
    OutsideDomain(Vec<f64>),

    #[error("exact-solution norm is zero; relative error undefined")]
    ZeroExactNorm,

    #[error("training diverged at iteration {iteration}: {details}")]
    Diverged { iteration: usize, details: String },

    #[error("unknown case id {got:?}; valid cases: {valid}")]
    UnknownCase { got: String, valid: String },

    #[error("unknown sampler {got:?}; valid samplers: {valid}")]
    UnknownSampler { got: String, valid: String },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("config file error: {0}")]
    ConfigFile(String),

    #[error("snapshot format error: {0}")]
    SnapshotFormat(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
