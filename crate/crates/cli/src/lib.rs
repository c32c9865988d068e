//! Batch experiment runner for `grouplab`.

pub mod config;
pub mod error;
pub mod experiments;
pub mod report;

pub use config::{Experiment, ExperimentConfig, Format};
pub use error::CliError;
pub use experiments::run_experiment;
pub use report::{emit_report, Report};
