use thiserror::Error;

/// Errors raised by the laboratory. Variants follow the failure classes the
/// experiment runner maps onto exit codes.
#[derive(Debug, Error)]
pub enum Error {
    /// Invalid construction parameters (grid sizes, orders, partition depth).
    #[error("configuration error: {0}")]
    Config(String),
    /// An operation was called on inputs of the wrong kind.
    #[error("usage error: {0}")]
    Usage(String),
    /// The object cannot supply what was requested, e.g. x-derivatives of a
    /// symbol that is only bounded measurable in x.
    #[error("capability error: {0}")]
    Capability(String),
    /// A sample point lies where the object is undefined.
    #[error("domain error: {0}")]
    Domain(String),
    /// A numerical precondition of an experiment does not hold.
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
