use std::path::PathBuf;

use thermo_lindblad::Error as CoreError;
use thiserror::Error;

/// Process exit codes.
pub mod exit {
    pub const PASS: i32 = 0;
    pub const CHECK_FAILED: i32 = 1;
    pub const PARSE: i32 = 2;
    pub const PHYSICS: i32 = 3;
    pub const NUMERICAL: i32 = 4;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },

    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },

    #[error("config parse error: {0}")]
    Parse(String),

    #[error("config error at `{path}`: {message}")]
    Schema { path: String, message: String },

    #[error("physics violation at `{path}`: {message}")]
    Physics { path: String, message: String },

    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Read { .. } | CliError::Parse(_) | CliError::Schema { .. } => exit::PARSE,
            CliError::Physics { .. } => exit::PHYSICS,
            CliError::Write { .. } | CliError::Numerical(_) => exit::NUMERICAL,
        }
    }

    pub fn schema(path: impl Into<String>, message: impl Into<String>) -> Self {
        CliError::Schema { path: path.into(), message: message.into() }
    }

    pub fn physics(path: impl Into<String>, message: impl Into<String>) -> Self {
        CliError::Physics { path: path.into(), message: message.into() }
    }

    /// Classifies a core error raised while processing the config field at `path`.
    pub fn at(path: impl Into<String>, err: CoreError) -> Self {
        let path = path.into();
        match err {
            CoreError::NotHermitian { .. }
            | CoreError::InvalidState(_)
            | CoreError::InvalidRate { .. }
            | CoreError::InvalidArgument(_)
            | CoreError::InvalidAlpha(_) => CliError::physics(path, err.to_string()),
            CoreError::DimensionMismatch { .. } | CoreError::UnknownTransition { .. } => {
                CliError::schema(path, err.to_string())
            }
            CoreError::NotSquareLength(_)
            | CoreError::MissingOperand(_)
            | CoreError::NonIdentityMap(_)
            | CoreError::NoStationaryState(_)
            | CoreError::Numerical(_) => CliError::Numerical(format!("{path}: {err}")),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
