//! Experiment runner behind the `disdrift` binary: presets, JSON
//! configuration, CSV output and gnuplot scripts.

pub mod commands;
pub mod config;
pub mod output;
pub mod presets;

pub use commands::{Outcome, RunOptions};
pub use config::ExperimentConfig;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    /// 1 for configuration and I/O problems, 2 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Numerical(_) => 2,
            CliError::Config(_) | CliError::Io(_) => 1,
        }
    }
}

impl From<disdrift_core::Error> for CliError {
    fn from(e: disdrift_core::Error) -> Self {
        if e.is_numerical() {
            CliError::Numerical(e.to_string())
        } else {
            CliError::Config(e.to_string())
        }
    }
}
