use thiserror::Error;

/// Failure modes shared by every operation in the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Input violates a documented precondition or type invariant.
    #[error("rejected input: {0}")]
    Rejected(String),
    /// A linear solve or transformation is numerically singular at the requested tolerance.
    #[error("numerical degeneracy: {0}")]
    Degenerate(String),
    /// Malformed JSON or schema mismatch.
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn rejected(msg: impl Into<String>) -> Error {
    Error::Rejected(msg.into())
}

pub(crate) fn degenerate(msg: impl Into<String>) -> Error {
    Error::Degenerate(msg.into())
}
