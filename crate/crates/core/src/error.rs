use thiserror::Error;

/// Errors raised by solver construction, operator evaluation and image I/O.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("non-finite entry {value} at index {index}")]
    NonFinite { index: usize, value: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("schedule rejected at n = {n}: {reason}")]
    Schedule { n: usize, reason: String },

    /// A step-size or metric condition required before iterating does not hold.
    #[error("condition `{condition}` violated: {detail}")]
    Condition { condition: &'static str, detail: String },

    #[error("image error: {0}")]
    Image(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}

pub(crate) fn check_dims(left: usize, right: usize) -> Result<()> {
    if left == right {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { left, right })
    }
}
