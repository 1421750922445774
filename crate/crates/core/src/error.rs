use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Caller-supplied data violates a documented precondition.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: malformed JSON: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },

    #[error("{path}: {message}")]
    Malformed { path: PathBuf, message: String },

    /// Rejection sampling ran out of attempts.
    #[error("infeasible placement: {0}")]
    Infeasible(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    /// True for errors caused by the caller's data rather than the environment.
    pub fn is_input_contract(&self) -> bool {
        matches!(
            self,
            Error::InvalidInput(_)
                | Error::Read { .. }
                | Error::Json { .. }
                | Error::Malformed { .. }
                | Error::Infeasible(_)
        )
    }
}
