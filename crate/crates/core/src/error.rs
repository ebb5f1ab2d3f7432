use thiserror::Error;

/// Errors produced by the analysis library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("signal grids do not match: {0}")]
    GridMismatch(String),

    #[error("non-finite sample at index {0}")]
    NonFinite(usize),

    #[error("grid is empty: {0}")]
    EmptyGrid(&'static str),

    #[error("no grid node in the zone exceeds the threshold at b = {b}")]
    NonEmptyViolation { b: f64 },

    #[error("expected {expected} ridges but only {found} were found")]
    TooFewRidges { expected: usize, found: usize },

    #[error("no ridges found")]
    NoRidges,

    #[error("degenerate separation: {0}")]
    DegenerateSeparation(String),

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("malformed input: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn param<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Parameter(msg.into()))
}
