use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of a function.
    #[error("domain error: {0}")]
    Domain(String),
    /// A model parameter (β, p, ε, ...) violates its admissible range.
    #[error("parameter error: {0}")]
    Parameter(String),
    /// The call is inconsistent (mismatched windows, wrong arity, off-grid time).
    #[error("usage error: {0}")]
    Usage(String),
    /// A simulation configuration is incomplete or inconsistent.
    #[error("configuration error: {0}")]
    Config(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("capacity exceeded: {0}")]
    Capacity(String),
    /// A numerical procedure failed (non-realizable covariance, non-finite output).
    #[error("numerical error: {0}")]
    Numerical(String),
}

impl Error {
    /// True for failures caused by the caller's input rather than by numerics.
    pub fn is_input_error(&self) -> bool {
        !matches!(self, Error::Numerical(_))
    }
}
