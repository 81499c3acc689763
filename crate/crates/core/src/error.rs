use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("frame dimension mismatch: expected {expected}, found {found}")]
    FrameMismatch { expected: usize, found: usize },

    #[error("degree mismatch: expected {expected}, found {found}")]
    DegreeMismatch { expected: usize, found: usize },

    #[error("position {pos} out of range for a block of width {width} in degree {degree}")]
    PositionOutOfRange {
        pos: usize,
        width: usize,
        degree: usize,
    },

    #[error("tensor shape mismatch: {0}")]
    Shape(String),

    /// A named structural invariant is violated; `name` is stable and is what
    /// the CLI prints (e.g. `lambda_antihermitian`).
    #[error("invariant `{name}` violated: {detail}")]
    Invariant { name: &'static str, detail: String },

    #[error("singular {0}")]
    Singular(&'static str),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("unknown fixture `{0}`")]
    UnknownFixture(String),

    /// Two computations that must agree did not.
    #[error("internal inconsistency: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
