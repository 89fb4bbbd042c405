use thiserror::Error;

/// Errors shared by every module of the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("conditioning on an event of probability zero")]
    ZeroConditioning,
    #[error("table would need {needed} atoms, budget is {budget}")]
    AlphabetOverflow { needed: u128, budget: u128 },
    #[error("event weight {0} is outside [0, 1]")]
    WeightOutOfRange(String),
    #[error("table total mass is {0}, expected 1")]
    NotNormalized(String),
    #[error("negative mass {0}")]
    NegativeMass(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("argument outside the domain: {0}")]
    Domain(String),
    #[error("invalid quantum state: {0}")]
    InvalidState(String),
    #[error("expected {expected} bits, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("malformed opening: {0}")]
    MalformedOpening(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("smoothing parameter {0} is not below 1")]
    SmoothingOutOfRange(String),
    #[error("function does not satisfy the distinct-rows condition")]
    ConditionViolated,
    #[error("no pair of inputs y1 (injective) and y2 (constant) exists")]
    NoWitness,
    #[error("primitive {0} is not a function table")]
    NotAFunction(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
