//! Error type shared by all modules.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A caller violated an operation contract (shape or length mismatch).
    #[error("dimension mismatch: {0}")]
    DimMismatch(String),

    /// Inconsistent configuration, e.g. a regime/penalty mismatch.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// The operation refuses to run, e.g. an oracle asked to enumerate an
    /// exponentially large space.
    #[error("refused: {0}")]
    Refusal(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
