//! Crate-wide error type. Each variant maps onto one CLI exit code.

use thiserror::Error;

use crate::interval::IntervalError;

#[derive(Debug, Error)]
pub enum Error {
    /// A mathematical precondition failed (bad argument, empty range, ...).
    #[error("domain error: {0}")]
    Domain(String),
    /// A parameter combination is not admissible.
    #[error("configuration error: {0}")]
    Config(String),
    /// A size or budget limit was exceeded.
    #[error("resource error: {0}")]
    Resource(String),
    /// A cache or checkpoint file is malformed.
    #[error("format error: {0}")]
    Format(String),
    #[error(transparent)]
    Interval(#[from] IntervalError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code: 2 for domain/configuration problems, 3 for
    /// resource and file problems.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Domain(_) | Error::Config(_) | Error::Interval(_) => 2,
            Error::Resource(_) | Error::Format(_) | Error::Io(_) => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
