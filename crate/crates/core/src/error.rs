use std::io;

use thiserror::Error;

/// Errors raised by the generator, solvers, autoencoders and metrics.
#[derive(Debug, Error)]
pub enum Error {
    /// A configuration or shape precondition was violated.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    /// A numeric argument is outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// A dataset or weights file could not be decoded.
    #[error("format error: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidConfig(msg.into()))
}

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
