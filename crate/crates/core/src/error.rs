use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid ring descriptor: {0}")]
    InvalidDescriptor(String),

    #[error("operands belong to different rings ({left} vs {right})")]
    RingMismatch { left: String, right: String },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("length mismatch: v has {v} entries, w has {w}")]
    LengthMismatch { v: usize, w: usize },

    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    #[error("ring {0} is not enumerable")]
    NotEnumerable(String),

    #[error("enumeration needs {needed} points, budget is {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },

    #[error("point is not on the unit sphere (v.w = {0})")]
    NotUnitSphere(String),

    #[error("matrix is not a Suslin matrix: {0}")]
    NotSuslin(String),

    #[error("matrix is not alternating: {0}")]
    NotAlternating(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("action left the enumerated universe at point {0}")]
    LeftUniverse(String),

    #[error("internal inconsistency: {0}")]
    Inconsistency(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
