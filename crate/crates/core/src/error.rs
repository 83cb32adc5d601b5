use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("field order {p}^{m} does not fit in 64 bits")]
    FieldTooLarge { p: u64, m: u32 },
    #[error("zero polynomial")]
    ZeroPolynomial,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),
    #[error("group order exceeds cap {cap}")]
    OrderCapExceeded { cap: usize },
    #[error("not a subgroup: {0}")]
    NotSubgroup(String),
    #[error("element is not idempotent")]
    NotIdempotent,
    #[error("element is not invertible")]
    Singular,
    #[error("field GF({p}^{m}) too small to split the algebra")]
    FieldTooSmall { p: u64, m: u32 },
    #[error("bad input: {0}")]
    Input(String),
    #[error("bifreeness check failed: {0}")]
    NotBifree(String),
    #[error("invalid biset shape: {0}")]
    BadShape(String),
    #[error("randomized search exhausted: {0}")]
    Exhausted(String),
    #[error("internal consistency failure: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
