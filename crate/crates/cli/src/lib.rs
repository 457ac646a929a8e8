//! Declarative experiment runner for the gklab laboratory.
//!
//! A run is described by an [`ExperimentConfig`]; [`run_experiment`]
//! evaluates it and returns a [`Report`] whose table becomes
//! `<out>/<kind>.csv` and whose fits and bands become
//! `<out>/<kind>.summary.json`.

pub mod config;
mod experiments;
pub mod report;

pub use config::{ConfigFile, ExperimentConfig, ExperimentKind};
pub use experiments::run_experiment;
pub use report::{Band, Report, Summary, Table};

/// Process exit codes.
pub mod exit {
    pub const SUCCESS: i32 = 0;
    pub const VALIDATION: i32 = 2;
    pub const PARTIAL: i32 = 3;
    pub const INTERNAL: i32 = 4;
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage error: {0}")]
    Usage(String),
    #[error("invalid config: {0}")]
    Validation(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Validation(_) => exit::VALIDATION,
            CliError::Internal(_) => exit::INTERNAL,
        }
    }
}
