use std::io;
use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid config field `{field}`: {reason}")]
    Config { field: &'static str, reason: String },

    #[error(transparent)]
    Core(#[from] ampshield_core::Error),

    #[error("I/O error on {}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },

    #[error("verification failed: {0}")]
    Verify(String),
}

impl CliError {
    pub fn config(field: &'static str, reason: impl Into<String>) -> Self {
        CliError::Config {
            field,
            reason: reason.into(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit status: 1 verification failure, 2 invalid input, 3 I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Verify(_) => 1,
            CliError::Config { .. } | CliError::Core(_) => 2,
            CliError::Io { .. } => 3,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
