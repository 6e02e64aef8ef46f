use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// Incompatible dimensions, variable counts, or point arities.
    #[error("shape mismatch: {0}")]
    Shape(String),

    /// Numerical failure (non-PSD square root, exhausted retries, ...).
    #[error("numerical failure: {0}")]
    Numerics(String),

    /// Structurally invalid input (failed validation, out-of-range index).
    #[error("invalid input: {0}")]
    Invalid(String),
}

impl Error {
    pub fn shape(msg: impl Into<String>) -> Self {
        Error::Shape(msg.into())
    }

    pub fn numerics(msg: impl Into<String>) -> Self {
        Error::Numerics(msg.into())
    }

    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
