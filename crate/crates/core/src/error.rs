use thiserror::Error;

/// Errors produced by the train-track toolkit.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TrakError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("dangling end: branch {branch} end {end} is not attached to any switch")]
    DanglingEnd { branch: u32, end: u8 },

    #[error("slot conflict: {0}")]
    SlotConflict(String),

    #[error("region constraint violated: {0}")]
    RegionConstraint(String),

    #[error("inconsistent Euler characteristic: {0}")]
    EulerCharacteristic(String),

    #[error("unknown branch {0}")]
    UnknownBranch(usize),

    #[error("branch {branch} is {actual}, expected {expected}")]
    WrongBranchKind {
        branch: usize,
        expected: &'static str,
        actual: &'static str,
    },

    #[error("invalid move: {0}")]
    InvalidMove(String),

    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("word is not admissible at position {0}")]
    NotAdmissible(usize),

    #[error("word is not tight")]
    NotTight,

    #[error("not primitive: {0}")]
    NonPrimitive(String),

    #[error("subshift is not closed (node budget exhausted)")]
    NotClosed,

    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("arithmetic overflow: {0}")]
    Overflow(String),

    #[error("inconsistent cylinder masses: {0}")]
    InconsistentMasses(String),

    #[error("out of range: {0}")]
    OutOfRange(String),

    #[error("format error: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, TrakError>;
