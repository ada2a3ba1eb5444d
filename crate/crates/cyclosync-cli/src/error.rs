//! CLI errors and their exit codes.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad or unreadable configuration, bad flags. Exit code 2.
    #[error("configuration error: {0}")]
    Config(String),
    /// Numerical failure during a run. Exit code 3.
    #[error("numerical error: {0}")]
    Numerical(String),
    /// A statistical check failed. Exit code 4.
    #[error("validation failed: {0}")]
    Validation(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) | CliError::Io(_) => 3,
            CliError::Validation(_) => 4,
        }
    }
}

impl From<cyclosync::Error> for CliError {
    fn from(e: cyclosync::Error) -> Self {
        use cyclosync::Error as E;
        match e.root() {
            E::InvalidParameter { .. } | E::Structural(_) | E::ModelConsistency(_) | E::Resource(_) => {
                CliError::Config(e.to_string())
            }
            E::LinearAlgebra(_) | E::NumericalDivergence(_) | E::Estimation(_) | E::Trial { .. } => {
                CliError::Numerical(e.to_string())
            }
        }
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Numerical(format!("csv output: {e}"))
    }
}
