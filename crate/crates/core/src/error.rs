use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("failed to read {}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed table: {0}")]
    Table(String),

    #[error("cannot parse cell at row {row}, column `{column}`: {value:?}")]
    Cell {
        row: usize,
        column: String,
        value: String,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("diverged at iteration {iteration}: {what}")]
    Diverged { iteration: usize, what: String },

    #[error("linear system is not positive definite")]
    NotPositiveDefinite,

    #[error("{failed} of {total} splits failed; last error: {last}")]
    TooManyFailures {
        failed: usize,
        total: usize,
        last: String,
    },

    #[error("serialization failed")]
    Serde(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
