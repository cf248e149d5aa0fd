use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("arity {0} is outside the supported range 1..=24")]
    UnsupportedArity(usize),

    #[error("arity mismatch: expected {expected}, got {got}")]
    ArityMismatch { expected: usize, got: usize },

    #[error("table has {got} entries, expected {expected}")]
    TableLength { expected: usize, got: usize },

    #[error("input {0:#b} is outside the domain")]
    OffDomain(u32),

    #[error("function must be total")]
    NotTotal,

    #[error("missing label for slice point {0:#b}")]
    MissingLabel(u32),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("exact computation refused: arity {n} exceeds the exhaustive cap {cap}")]
    ExactRefused { n: usize, cap: usize },

    #[error("critical certificate unavailable: critical block sensitivity was not computed exactly")]
    CriticalUnavailable,

    #[error("approximation contract violated at point {point:#b}: {detail}")]
    Contract { point: u32, detail: String },

    #[error("value {value} at point {point:#b} leaves the range [-2, 2] after scaling")]
    RangeViolation { point: u32, value: f64 },

    #[error("sign polynomial construction failed: {0}")]
    SignConstruction(String),

    #[error("LP solver failure: {0}")]
    Lp(String),

    #[error("malformed clause {index}: {detail}")]
    MalformedClause { index: usize, detail: String },

    #[error("parse error on line {line}: {detail}")]
    Parse { line: usize, detail: String },

    #[error("{path}: {detail}")]
    Io { path: String, detail: String },

    #[error("internal invariant broken: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn parse(line: usize, detail: impl Into<String>) -> Self {
        Error::Parse {
            line,
            detail: detail.into(),
        }
    }
}
