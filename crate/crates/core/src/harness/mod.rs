//! Experiment orchestration: per-case configuration, the three-phase
//! pipeline, result emission, and cross-sampler comparison.

pub mod compare;
pub mod config;
pub mod emit;
pub mod pipeline;

pub use compare::{compare, improvement_pct, render, CaseSummary, SamplerSummary};
pub use config::{
    load_config, read_file_config, CaseId, CliOverrides, FileConfig, RunConfig, SamplerId,
    ALL_CASES, ALL_SAMPLERS,
};
pub use emit::{emit_results, results_csv, RESULTS_FILE, RESULTS_HEADER};
pub use pipeline::{run_pipeline, Artifacts, RunRecord};
