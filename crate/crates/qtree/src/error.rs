use thiserror::Error;

/// Syntax error in the term or element grammar.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("parse error at byte {position}: {message}")]
pub struct ParseError {
    pub position: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("leaf index is too large to represent")]
    IndexTooLarge,
    #[error("A_0 is undefined")]
    ZeroArity,
    #[error("A_{0} is too large to expand")]
    ArityTooLarge(String),
    #[error("expected {expected} arguments, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("iterated pairing needs at least two arguments")]
    ShortSequence,
    #[error("swapped indices must be distinct and positive")]
    BadSwap,
    #[error("depth {requested} exceeds the guard {guard}")]
    GuardExceeded { requested: u64, guard: u64 },
    #[error("closure grew past {0} elements")]
    SizeExceeded(usize),
    #[error("term {0} lies outside the windowed closure")]
    OutsideClosure(String),
    #[error("{0}")]
    State(String),
    #[error("malformed transcript: {0}")]
    Schema(String),
}
