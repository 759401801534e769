use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CesError {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("domain mismatch: {0}")]
    DomainMismatch(String),

    #[error("unsupported space combination: {0}")]
    Unsupported(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("undecidable: {0}")]
    Undecidable(String),

    /// An iterative solver stopped without meeting its tolerance.
    /// The bracket is `[lower, upper]` on the sought value.
    #[error("solver did not converge: {message} (bracket [{lower}, {upper}])")]
    NotConverged {
        message: String,
        lower: f64,
        upper: f64,
    },
}

pub type Result<T> = std::result::Result<T, CesError>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(CesError::InvalidInput(msg.into()))
}

pub(crate) fn unsupported<T>(msg: impl Into<String>) -> Result<T> {
    Err(CesError::Unsupported(msg.into()))
}
