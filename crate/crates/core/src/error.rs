use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The requested exact solver does not cover this instance size.
    #[error("unsupported size: {0}")]
    UnsupportedSize(String),

    #[error("resource limit: {what} is {got}, cap is {cap}")]
    ResourceLimit { what: &'static str, got: usize, cap: usize },

    #[error("{path}: line {line}: {msg}")]
    Parse { path: String, line: usize, msg: String },

    #[error("validation error: {0}")]
    Validation(String),

    #[error("config error at `{field}`: {msg}")]
    Config { field: String, msg: String },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    /// Process exit code used by the command-line tool.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::ResourceLimit { .. } => 2,
            Error::Io { .. } => 3,
            _ => 1,
        }
    }
}
