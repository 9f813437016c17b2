use num_bigint::BigUint;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("field order {p}^{k} exceeds the supported maximum of 2^16")]
    DegreeTooLarge { p: u64, k: u32 },

    #[error("division by zero")]
    DivisionByZero,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("enumeration needs {required} evaluations but the budget is {budget}")]
    BudgetExceeded { required: BigUint, budget: u64 },

    #[error("rank {r} out of range for dimension {k}")]
    RankOutOfRange { k: usize, r: usize },

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    #[error("operation needs 1/2, unavailable in characteristic 2")]
    EvenCharacteristic,

    #[error("alpha must be nonzero")]
    ZeroAlpha,

    #[error("parse error: {0}")]
    Parse(String),
}
