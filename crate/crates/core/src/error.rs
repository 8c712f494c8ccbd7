use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("characteristic {0} is below 5")]
    SmallCharacteristic(u64),
    #[error("extension degree k must be at least 1")]
    ZeroDegree,
    #[error("field of size {size} exceeds the size cap {cap}")]
    SizeCapExceeded { size: u128, cap: u64 },
    #[error("the zero element has no {0}")]
    ZeroElement(&'static str),
    #[error("invalid coordinate vector: {0}")]
    BadCoordinates(String),
    #[error("{m} does not divide the group order {order}")]
    NotADivisor { m: u64, order: u64 },
    #[error("element is not in the subfield F_q")]
    NotInSubfield,
    #[error("element is not a d-th root of unity")]
    NotInMuD,
    #[error("invalid exponent tuple: {0}")]
    InvalidTuple(String),
    #[error("{u} is not a unit modulo {d}")]
    NotAUnit { u: u64, d: u64 },
    #[error("invalid character order {order} (must divide d = {d})")]
    InvalidOrder { order: u64, d: u64 },
    #[error("invalid line datum: {0}")]
    InvalidLine(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("value is not rational: {0}")]
    NotRational(String),
    #[error("point is not on the curve")]
    NotOnCurve,
    /// An arithmetic consistency check failed. This would contradict a proven
    /// statement, so it signals a bug rather than bad input.
    #[error("internal inconsistency: {0}")]
    Internal(String),
}

impl Error {
    /// True for errors that indicate a mathematical contradiction rather than
    /// invalid input.
    pub fn is_internal(&self) -> bool {
        matches!(self, Error::Internal(_))
    }
}
