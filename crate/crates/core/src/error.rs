use thiserror::Error;

/// Errors produced by the measures in this crate.
#[derive(Debug, Error)]
pub enum MacromicError {
    /// An input violated a precondition (negative weight, non-Hermitian matrix, ...).
    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    /// A numerical routine did not reach its tolerance. The partial estimate is kept.
    #[error("numeric failure: {message} (estimate {estimate}, abs error {abs_error:e})")]
    Numeric {
        message: String,
        estimate: f64,
        abs_error: f64,
    },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, MacromicError>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(MacromicError::Domain(msg.into()))
}
