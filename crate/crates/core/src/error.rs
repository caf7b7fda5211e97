use thiserror::Error;

/// Errors raised by every fallible operation in this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("capacity exceeded: {what} is {requested}, maximum is {limit}")]
    Capacity {
        what: &'static str,
        requested: usize,
        limit: usize,
    },

    #[error(
        "matrix is not Hermitian: residual ||A - A^H||_F = {residual:e} exceeds {tolerance:e}"
    )]
    NotHermitian { residual: f64, tolerance: f64 },

    #[error("non-finite entry at index {0}")]
    NonFinite(usize),

    #[error("vector is not normalized: norm^2 = {norm_sqr}, deviation {deviation:e} exceeds 1e-9")]
    NotNormalized { norm_sqr: f64, deviation: f64 },

    #[error("density matrix trace is {trace}, deviation {deviation:e} exceeds 1e-9")]
    TraceNotOne { trace: f64, deviation: f64 },

    #[error("density matrix is not positive semidefinite: minimum eigenvalue {min_eigenvalue:e}")]
    NotPositive { min_eigenvalue: f64 },

    #[error("expectation value is not real: imaginary part {0:e}")]
    NonRealExpectation(f64),

    #[error("invalid inverse temperature {0}: {1}")]
    InvalidBeta(f64, &'static str),

    #[error("invalid model parameter: {0}")]
    InvalidParameter(String),

    #[error("{0} did not converge")]
    NoConvergence(&'static str),

    #[error("invalid file contents: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;
