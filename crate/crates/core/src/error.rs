use crate::simplex::LpStatus;

/// Library-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Malformed input: bad dimensions, broken invariants, invalid config.
    #[error("validation error: {0}")]
    Validation(String),

    /// The LP relaxation did not come back optimal where an optimum was required.
    #[error("LP relaxation not optimal: status {0:?}")]
    LpNotOptimal(LpStatus),

    /// Numerical breakdown (degenerate pivots, non-finite losses, ...).
    #[error("numerical error: {0}")]
    Numerical(String),

    /// Checkpoint format version not understood by this build.
    #[error("checkpoint version {found} unsupported (expected {expected})")]
    CheckpointVersion { found: u32, expected: u32 },

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    pub fn numerical(msg: impl Into<String>) -> Self {
        Error::Numerical(msg.into())
    }

    /// True for errors caused by bad user input rather than runtime failure.
    pub fn is_validation(&self) -> bool {
        matches!(self, Error::Validation(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
