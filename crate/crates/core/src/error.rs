use std::io;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("shape error: {0}")]
    Shape(String),

    #[error("non-finite value in {0}")]
    NonFinite(String),

    #[error("token id {id} out of range for vocabulary of size {size}")]
    Vocabulary { id: u32, size: usize },

    #[error("time step {t} out of range 1..={len}")]
    Index { t: usize, len: usize },

    #[error("empty sequence: {0}")]
    EmptySequence(String),

    #[error("invalid label {0}: expected 0 or 1")]
    Label(String),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid configuration `{key}`: {msg}")]
    Config { key: String, msg: String },

    #[error("metric error: {0}")]
    Metric(String),

    #[error("state error: {0}")]
    State(String),

    #[error("checkpoint error: {0}")]
    Checkpoint(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Error {
    pub(crate) fn shape(msg: impl Into<String>) -> Self {
        Error::Shape(msg.into())
    }

    pub(crate) fn config(key: impl Into<String>, msg: impl Into<String>) -> Self {
        Error::Config {
            key: key.into(),
            msg: msg.into(),
        }
    }
}
