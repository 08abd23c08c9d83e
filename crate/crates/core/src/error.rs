use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec::Vec;

/// Errors produced by the library.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("operator is not Hermitian (max |M - M^dagger| = {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("operator is not positive semidefinite (min eigenvalue {min_eigenvalue:e})")]
    NotPositive { min_eigenvalue: f64 },

    #[error("trace {trace} differs from one")]
    TraceNotOne { trace: f64 },

    #[error("vector norm {norm} differs from one")]
    NotNormalized { norm: f64 },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("function undefined at eigenvalue {eigenvalue:e}")]
    Domain { eigenvalue: f64 },

    #[error("invalid Renyi order {0}")]
    InvalidOrder(f64),

    #[error("invalid channel: {0}")]
    InvalidChannel(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("epsilon extrapolation did not converge (extrapolants {extrapolants:?})")]
    Extrapolation {
        log_inv_epsilons: Vec<f64>,
        values: Vec<f64>,
        extrapolants: Vec<f64>,
    },

    #[error("solver stopped after {iterations} iterations with residual {residual:e} (best value {best_value})")]
    NotConverged {
        iterations: usize,
        residual: f64,
        best_value: f64,
    },

    #[error("restarts disagree by {spread:e}: {values:?}")]
    MultiModal { values: Vec<f64>, spread: f64 },

    #[error("size limit exceeded: {0}")]
    SizeLimit(String),

    #[error("universal symmetric state fails dominance (margin {margin:e}) on witness {witness}")]
    Dominance { margin: f64, witness: String },

    #[error("probability {0} outside [0, 1]")]
    Probability(f64),

    #[error("at lambda = {lambda}: {source}")]
    AtLambda { lambda: f64, source: Box<Error> },
}

pub type Result<T> = core::result::Result<T, Error>;
