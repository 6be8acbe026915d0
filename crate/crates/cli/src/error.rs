use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}:{line}: {message}")]
    Config { path: PathBuf, line: usize, message: String },

    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },

    #[error("{path}: {source}")]
    Input { path: PathBuf, source: a2bcd::Error },

    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Core(#[from] a2bcd::Error),
}

impl CliError {
    /// 1 for numeric failures of a run, 2 for everything the user can fix
    /// in the invocation or its files.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(a2bcd::Error::Numeric(_)) => 1,
            _ => 2,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
