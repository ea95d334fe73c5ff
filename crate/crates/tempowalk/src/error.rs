//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed input text; carries the 1-based line number.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// A precondition on some input was violated.
    #[error("invalid input: {0}")]
    Invalid(String),

    /// Index lookup outside the valid range.
    #[error("out of range: {0}")]
    OutOfRange(String),

    /// A quantity with no defined value (zero vector, all-tied ranks).
    #[error("undefined: {0}")]
    Undefined(String),

    /// Non-finite parameters detected during training.
    #[error("non-finite parameter at epoch {epoch} after {updates} updates")]
    NonFinite { epoch: usize, updates: u64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
