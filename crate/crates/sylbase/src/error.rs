use thiserror::Error;

/// Errors shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// An argument lies outside the documented domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// Malformed formula or data text; `offset` is a byte offset into the input.
    #[error("parse error at offset {offset}: {message}")]
    Parse { offset: usize, message: String },
    /// A catalog lookup failed.
    #[error("catalog error: {0}")]
    Catalog(String),
    /// Internal data disagree with each other (for instance a non-integral quotient).
    #[error("consistency error: {0}")]
    Consistency(String),
    /// A configured size or index threshold was exceeded.
    #[error("resource limit exceeded: {0}")]
    Resource(String),
    /// Bad user input such as an unknown driver name.
    #[error("usage error: {0}")]
    Usage(String),
    /// A randomised search ran out of budget without reaching its target.
    #[error("search failed: {0}")]
    SearchFailed(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
