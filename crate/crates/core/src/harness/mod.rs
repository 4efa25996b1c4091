//! Experiment orchestration: initial solutions, seeded suites, aggregation,
//! growth fitting, configuration, and self-validation.

pub mod config;
pub mod growth;
pub mod init;
pub mod suite;
pub mod validate;

pub use growth::{fit_growth, GrowthFit, GrowthLaw, GrowthPoint, Term};
pub use init::{make_init, InitFamily, InitKind, InitSize};
pub use suite::{
    derive_seed, read_raw_csv, read_summary_json, run_suite, summarize, write_raw_csv,
    write_summary_json, write_trace_csv, CellSummary, ExperimentConfig, SuiteOutput, SuiteSummary,
    TrialResult,
};
