use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("off-diagonal block A_{n} is singular (smallest singular value {sigma_min:e})")]
    SingularBlock { n: usize, sigma_min: f64 },

    #[error("diagonal block B_{n} is not Hermitian (defect {defect:e})")]
    NonHermitian { n: usize, defect: f64 },

    #[error("non-finite entry in {what}")]
    NonFinite { what: &'static str },

    #[error("singular linear system: {0}")]
    SingularSolve(String),

    #[error("spectral parameter collides with an atom at {lambda}")]
    AtomCollision { lambda: f64 },

    #[error("weight at index {index} is not positive semidefinite (min eigenvalue {min_eig:e})")]
    NotPsd { index: usize, min_eig: f64 },

    #[error("horizon exhausted at {horizon} nodes before bracketing")]
    HorizonExhausted { horizon: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
