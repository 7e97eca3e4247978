use thiserror::Error;

/// Errors raised by the peelkit library.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("point set is not in general position: points {subset:?} are affinely dependent")]
    Degenerate { subset: Vec<usize> },

    #[error("input of size {size} exceeds the limit of {limit}")]
    TooLarge { size: usize, limit: usize },

    #[error("state budget of {budget} exhausted")]
    StateBudget { budget: usize },

    #[error("block labels are missing")]
    MissingBlocks,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("certification failed: {0}")]
    Certification(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// True for errors caused by resource caps rather than bad input.
    pub fn is_resource(&self) -> bool {
        matches!(self, Error::StateBudget { .. } | Error::TooLarge { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
