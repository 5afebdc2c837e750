//! Error type shared by every module of the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("operation not supported for case {0}")]
    UnsupportedCase(String),
    #[error("operators or series belong to different cases: {0} vs {1}")]
    CaseMismatch(String, String),
    #[error("q^(1/{ell}) is not rational for q = {q}")]
    NonRationalRamifiedParameter { q: String, ell: u64 },
    #[error("ramification index exceeds the supported bound {0}")]
    NoncommensurableRamification(u64),
    #[error("no output coefficient is certain at the available truncation")]
    TruncationTooShort,
    #[error("division by a series that vanishes to its truncation order")]
    ZeroDivisor,
    #[error("operator has zero trailing coefficient; strip powers of the operator first")]
    ZeroTrailingCoefficient,
    #[error("the given function is not a solution of the operator")]
    NotASolution,
    #[error("gauge matrix is singular")]
    SingularGauge,
    #[error("system matrix is singular")]
    SingularSystem,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("no cyclic vector found after {0} attempts")]
    CyclicSearchExhausted(usize),
    #[error("prefix leaves free coefficients at exponents {0:?}")]
    AmbiguousPrefix(Vec<i64>),
    #[error("prefix cannot be extended: obstruction at exponent {0}")]
    InconsistentPrefix(i64),
    #[error("exponent window of {0} exceeds the configured bound")]
    WindowTooLarge(i64),
    #[error("degree bound {needed} exceeds the cap {cap}")]
    DegreeBoundExceeded { needed: i64, cap: i64 },
    #[error("evaluation point is not inside the open unit disc")]
    OutsideDisc,
    #[error("requested precision unreachable within {0} terms")]
    PrecisionUnreachable(usize),
    #[error("internal consistency check failed: {0}")]
    Internal(String),
    #[error("parse error at {line}:{column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("semantic error: {0}")]
    Semantic(String),
    #[error("division by zero")]
    DivisionByZero,
}
