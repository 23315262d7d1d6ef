use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid density matrix: {0}")]
    InvalidDensity(String),
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("infeasible fidelity: F^k = {value} is below 1/d = {floor}")]
    InfeasibleFidelity { value: f64, floor: f64 },
    #[error("exact enumeration over {n} pairs exceeds the cap of {cap}")]
    TooLarge { n: usize, cap: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
