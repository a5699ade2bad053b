use thiserror::Error;

/// Errors reported by the library.
#[derive(Debug, Error)]
pub enum Error {
    /// A parameter violates a precondition (out of range, non-positive, ...).
    #[error("validation: {0}")]
    Validation(String),

    /// A requested operating point lies outside the transmission band.
    #[error("infeasible: {0}")]
    Infeasible(String),

    /// A numerical procedure failed (singular system, no bracket, edge contact, ...).
    #[error("numerical: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Finite and strictly positive; the common guard for physical parameters.
pub fn positive(value: f64) -> bool {
    value.is_finite() && value > 0.0
}

impl Error {
    pub fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    pub fn infeasible(msg: impl Into<String>) -> Self {
        Error::Infeasible(msg.into())
    }

    pub fn numerical(msg: impl Into<String>) -> Self {
        Error::Numerical(msg.into())
    }
}
