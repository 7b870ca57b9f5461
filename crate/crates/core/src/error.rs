use thiserror::Error;

/// Errors produced anywhere in the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A quadrature or series did not reach its tolerance.
    #[error("numerical error: {message} (residual estimate {residual:e})")]
    Numerical { message: String, residual: f64 },

    /// The input is valid but not handled by this operation.
    #[error("unsupported input: {0}")]
    Unsupported(String),

    /// Too few observations for the requested statistic.
    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// A sampler broke one of its own output invariants.
    #[error("invariant violation: {0}")]
    Invariant(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
