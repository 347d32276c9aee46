use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("variable-count mismatch: {0} vs {1}")]
    VariableCountMismatch(usize, usize),
    #[error("index {0} out of range for {1} variables")]
    IndexOutOfRange(usize, usize),
    #[error("pole-locus violation: {0}")]
    PoleLocusViolation(String),
    #[error("series did not stabilize: {0}")]
    NonStabilization(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("weight {weight} exceeds cutoff {cutoff}")]
    CutoffExceeded { weight: u32, cutoff: u32 },
    #[error("cochain is not composable: {0}")]
    NotComposable(String),
    #[error("inconsistent system: {0}")]
    Inconsistent(String),
    #[error("coincident sewing points: {0}")]
    CoincidentPoints(String),
}

pub type Result<T> = std::result::Result<T, Error>;
