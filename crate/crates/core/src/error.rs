use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("unstable pair (g, n) = ({g}, {n}): need 2g - 2 + n > 0")]
    UnstablePair { g: u32, n: usize },

    #[error("need at least {needed} samples with distinct abscissae, got {got}")]
    TooFewSamples { needed: usize, got: usize },

    #[error("inconsistent samples: surplus sample at x = {x} deviates from the degree-{degree} fit; raise the threshold or the degree bound")]
    InconsistentSamples { x: String, degree: usize },

    #[error("raw weighting sum is not divisible by r^{h1}")]
    NotDivisible { h1: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("series truncation {have} is smaller than the requested codimension {need}")]
    TruncationTooSmall { have: usize, need: usize },

    #[error("constructions disagree: {0}")]
    MismatchBetweenConstructions(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;
