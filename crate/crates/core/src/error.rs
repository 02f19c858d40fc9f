use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("modulus {0} is not a prime")]
    NotPrime(u64),
    #[error("modulus {0} outside the supported range [2, 2^62)")]
    ModulusOutOfRange(u64),
    #[error("operands belong to different fields (GF({left}) vs GF({right}))")]
    FieldMismatch { left: u64, right: u64 },
    #[error("division by zero")]
    DivisionByZero,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is singular (rank at most {rank_hint})")]
    Singular { rank_hint: usize },
    #[error("leading block minor singular at recursion level {level}")]
    NotStronglyRegular { level: usize },
    #[error("displacement operator is not invertible: {0}")]
    OperatorSingular(String),
    #[error("input matrix is singular (failing stage: {stage})")]
    SingularInput { stage: String },
    #[error("preconditioning failed after {attempts} attempts")]
    PreconditionFailure { attempts: usize },
    #[error("field too small: p = {p}, need p >= {required}")]
    FieldTooSmall { p: u64, required: u128 },
    #[error("retry budget exhausted after {attempts} attempts")]
    RetriesExhausted { attempts: usize },
    #[error("element is not a unit")]
    NotAUnit,
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("invalid group presentation: {0}")]
    InvalidGroup(String),
    #[error("invalid simplicial complex: {0}")]
    InvalidComplex(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub(crate) fn dim_err(msg: impl Into<String>) -> Error {
    Error::DimensionMismatch(msg.into())
}
