use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("series did not converge: {0}")]
    NonConvergence(String),

    /// The requested value exceeds the double-precision range.
    #[error("overflow: {0}")]
    Overflow(String),

    #[error("non-finite solution: {0}")]
    NonFiniteSolution(String),

    /// A search could not certify its answer with the given bounds.
    #[error("inconclusive: {0}")]
    Inconclusive(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

impl Error {
    /// Stable name of the error kind, used in machine-readable reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain(_) => "DomainError",
            Error::NonConvergence(_) => "NonConvergence",
            Error::Overflow(_) => "Overflow",
            Error::NonFiniteSolution(_) => "NonFiniteSolution",
            Error::Inconclusive(_) => "Inconclusive",
            Error::InvalidConfig(_) => "InvalidConfig",
        }
    }
}

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
