use alloc::string::String;

/// Errors raised by the optimizers and channel generators.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// A size argument violates a structural requirement (odd port count, non-square array, ...).
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),
    /// Matrix shapes passed to one operation do not agree.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    /// A scalar argument lies outside its admissible range.
    #[error("domain error: {0}")]
    Domain(String),
    /// A linear system has no (unique) solution.
    #[error("singular system: {0}")]
    Singular(String),
    /// The request is combinatorially too large to serve.
    #[error("refused: {0}")]
    TooLarge(String),
    /// A scenario configuration is inconsistent.
    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = core::result::Result<T, Error>;
