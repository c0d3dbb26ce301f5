use thiserror::Error;

/// Errors produced by the reservoir pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("rule number {0} is outside 0..=255")]
    RuleOutOfRange(i64),

    #[error("automaton width {0} is below the minimum of 3")]
    WidthTooSmall(usize),

    #[error("iteration count must be at least 1")]
    ZeroIterations,

    #[error("diffuse length {diffuse} is smaller than input width {input}")]
    DiffuseTooShort { diffuse: usize, input: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch in {context}: expected {expected}, got {actual}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        actual: usize,
    },

    #[error("pattern id {0} is outside 0..=31")]
    PatternOutOfRange(usize),

    #[error("non-finite value {0} cannot be binarized")]
    NonFinite(f64),

    #[error("normal equations are not positive definite (pivot {pivot} at column {column})")]
    NotPositiveDefinite { column: usize, pivot: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_len(context: &'static str, expected: usize, actual: usize) -> Result<()> {
    if expected == actual {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            context,
            expected,
            actual,
        })
    }
}
