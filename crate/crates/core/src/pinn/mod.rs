//! Composite physics losses, the full-batch training loop, and the
//! relative-L2 evaluation metric.

pub mod grad;
pub mod loss;
pub mod metric;
pub mod train;

pub use grad::{GradEngine, LossAndGrad};
pub use loss::{
    boundary_loss, boundary_op_indices, composite_loss, residual_loss, ExactField, JetField,
    LossWeights, MlpField,
};
pub use metric::{build_test_set, predict, relative_l2, TestSet};
pub use train::{train, HistoryRow, TrainConfig, TrainReport, ABORT_THRESHOLD};
