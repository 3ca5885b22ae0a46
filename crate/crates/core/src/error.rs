use thiserror::Error;

/// Errors shared by every module of the crate.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid assignment: {0}")]
    InvalidAssignment(String),
    #[error("invalid reconfiguration sequence: {0}")]
    InvalidSequence(String),
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("width mismatch: expected {expected}, got {actual}")]
    WidthMismatch { expected: usize, actual: usize },
    #[error("capacity exceeded: {what} needs {needed}, cap is {cap}")]
    Capacity { what: String, needed: u128, cap: u128 },
    #[error("parse error: {0}")]
    Parse(String),
    /// A lemma check found a counterexample.
    #[error("audit failure: {0}")]
    AuditFailure(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn capacity(what: impl Into<String>, needed: u128, cap: u128) -> Self {
        Error::Capacity { what: what.into(), needed, cap }
    }
}

/// Fails with [`Error::Capacity`] when `needed > cap`.
pub(crate) fn ensure_cap(what: &str, needed: u128, cap: u128) -> Result<()> {
    if needed > cap {
        Err(Error::capacity(what, needed, cap))
    } else {
        Ok(())
    }
}
