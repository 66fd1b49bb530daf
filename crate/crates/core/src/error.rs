use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// Malformed arguments: bad thresholds, indices, permutations.
    #[error("invalid input: {0}")]
    InvalidInput(String),
    /// Arguments outside the domain where a formula holds.
    #[error("outside domain: {0}")]
    Domain(String),
    /// The request exceeds a computational budget.
    #[error("resource limit: {0}")]
    Resource(String),
}

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
