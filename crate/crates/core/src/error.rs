use thiserror::Error;

/// Errors produced while building, searching or verifying covering arrays.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An input violated a documented bound.
    #[error("invalid input: {0}")]
    Validation(String),

    /// A count did not fit into `u64`.
    #[error("capacity exceeded: {0}")]
    Capacity(String),

    /// Malformed configuration notation.
    #[error("parse error at position {position}: {message}")]
    Parse { position: usize, message: String },

    /// A caller broke an operation's precondition.
    #[error("contract violation: {0}")]
    Contract(String),

    /// A generated array failed independent verification.
    #[error("internal invariant violated: {0}")]
    Invariant(String),

    /// Unknown report format or similar usage mistake.
    #[error("usage: {0}")]
    Usage(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    pub(crate) fn parse(position: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            position,
            message: msg.into(),
        }
    }
}
