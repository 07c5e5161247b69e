use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An argument is outside the domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("size mismatch: expected {expected}, got {actual}")]
    SizeMismatch { expected: usize, actual: usize },

    /// A received ciphertext matches neither valid state for the key.
    #[error("integrity error: {0}")]
    Integrity(String),

    #[error("malformed code file at line {line}: {msg}")]
    CodeFormat { line: usize, msg: String },

    #[error("input too large: {0}")]
    TooLarge(String),

    /// Signals a broken internal invariant rather than bad input.
    #[error("internal error: {0}")]
    Internal(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
