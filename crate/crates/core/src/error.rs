use thiserror::Error;

/// Errors produced by the numerical kernels, the extractor constructions and
/// the file formats.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not square: {0}x{1}")]
    NotSquare(usize, usize),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("operator carries no tensor factorization")]
    MissingFactors,

    #[error("factor index {0} out of range")]
    BadFactor(usize),

    #[error("weight is not positive semidefinite (min eigenvalue {0})")]
    NotPsd(f64),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension overflow: {0}")]
    Overflow(String),

    #[error("infeasible request: {0}")]
    Infeasible(String),

    #[error("solver did not converge: {0}")]
    NonConvergence(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
