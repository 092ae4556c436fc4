use std::path::PathBuf;

use thiserror::Error;

/// Failures of the harness, each mapped to a process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid config: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },

    #[error("solver failed: {0}")]
    Solver(adapg::Error),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Io { .. } => EXIT_IO,
            CliError::Solver(_) => EXIT_INTERNAL,
        }
    }
}

impl From<adapg::Error> for CliError {
    fn from(e: adapg::Error) -> Self {
        match e {
            adapg::Error::InvalidParameter(msg) => CliError::Config(msg),
            other => CliError::Solver(other),
        }
    }
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_INTERNAL: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_SAFEGUARD: i32 = 3;
pub const EXIT_IO: i32 = 4;
