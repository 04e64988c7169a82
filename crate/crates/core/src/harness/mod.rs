//! Seeded Monte-Carlo experiments and CSV reporting.

pub mod config;
pub mod experiments;
pub mod report;

pub use config::{Algorithm, BaselineGrid, ExperimentConfig, ExperimentKind, InstanceSpec};
pub use experiments::{exp1_gap_grid, exp2_instances, run_trials, run_trials_with};
pub use report::{ExperimentReport, ReportRow, TrialResult, CSV_HEADER};
