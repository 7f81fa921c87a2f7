use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("generator count must be at least 1")]
    EmptyAlphabet,
    #[error("generator index {index} out of range 1..={n}")]
    GeneratorOutOfRange { index: usize, n: usize },
    #[error("mismatched generator counts: {0} vs {1}")]
    RankMismatch(usize, usize),
    #[error("mismatched series parameters: {0}")]
    SeriesMismatch(String),
    #[error("multi-index of length {len} exceeds truncation degree {degree}")]
    IndexTooLong { len: usize, degree: usize },
    #[error("invalid coefficient ring: {0}")]
    InvalidRing(String),
    #[error("insufficient guard precision: need exponent modulo {needed}, got modulo {given}")]
    InsufficientGuard { needed: String, given: String },
    #[error("series is not invertible (constant term {0})")]
    NotInvertible(String),
    #[error("dense truncated series too large: {0} coefficients")]
    SeriesTooLarge(usize),
    #[error("not a Lyndon word: {0}")]
    NotLyndon(String),
    #[error("Lyndon word {0} has length 1 and no standard factorization")]
    NoFactorization(String),
    #[error("tensor is not in the span of the Lyndon basis (degree {0})")]
    NotLie(usize),
    #[error("basis elements out of order: {0} is not smaller than {1}")]
    OrderViolation(String, String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("malformed diagram: {0}")]
    MalformedDiagram(String),
    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
