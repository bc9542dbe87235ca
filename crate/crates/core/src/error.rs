use thiserror::Error;

/// Errors surfaced by the library. Verdict failures (a facet that does not
/// certify, a group order that disagrees) are *not* errors; they are reported
/// through the corresponding report types.
#[derive(Debug, Error)]
pub enum OapError {
    /// A caller-supplied value violates a documented bound.
    #[error("{0}")]
    Usage(String),

    /// `t = k` leaves no variables in the reduced inequality system.
    #[error("no variables in the reduced system: t = k = {0}")]
    NoVariables(usize),

    /// An operation's mathematical hypothesis does not hold.
    #[error("precondition failed: {0}")]
    Precondition(String),

    /// An exact-arithmetic consistency check failed. Indicates a bug.
    #[error("internal consistency error: {0}")]
    Internal(String),

    /// Malformed matrix text or JSON.
    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    /// Orbit counting was asked to work on a truncated solution set.
    #[error("solution set is not exhaustive; orbit counts would be meaningless")]
    NotExhaustive,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, OapError>;

pub(crate) fn usage<T>(msg: impl Into<String>) -> Result<T> {
    Err(OapError::Usage(msg.into()))
}
