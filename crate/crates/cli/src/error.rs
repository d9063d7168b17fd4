use std::io;
use std::path::PathBuf;

use thiserror::Error;

/// Failures that stop a command before it produces a report.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid scenario: {0}")]
    Scenario(String),
    #[error(transparent)]
    Core(#[from] vmgame_core::Error),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("malformed matrix file {}: {message}", path.display())]
    Matrix { path: PathBuf, message: String },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io { .. } => 3,
            CliError::Scenario(_) | CliError::Core(_) | CliError::Matrix { .. } => 2,
        }
    }
}
