//! Experiment driver for confidence-gated voting: scenario configs, sweeps
//! over N / T / tau, bound-versus-empirical tables, and confidence traces,
//! all emitted as CSV with a provenance header.

pub mod config;
pub mod run;

use thiserror::Error;

/// CLI-level errors, each mapped to a process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    /// Bad config file, flag, or argument combination. Exit code 2.
    #[error("config error: {0}")]
    Config(String),

    /// A numerical routine failed to converge. Exit code 3.
    #[error("numerical error: {0}")]
    Numerics(jurygate::Error),

    /// Filesystem trouble. Exit code 1.
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerics(_) => 3,
            CliError::Io(_) => 1,
        }
    }
}

impl From<jurygate::Error> for CliError {
    fn from(e: jurygate::Error) -> Self {
        match e {
            jurygate::Error::Convergence { .. } => CliError::Numerics(e),
            other => CliError::Config(other.to_string()),
        }
    }
}
