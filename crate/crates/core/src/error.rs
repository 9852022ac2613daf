use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong while validating a system or computing a decomposition.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("covariance is not positive definite (smallest eigenvalue {min_eigenvalue:e}, threshold {threshold:e})")]
    NotPositiveDefinite { min_eigenvalue: f64, threshold: f64 },

    #[error("covariance asymmetry {asymmetry:e} exceeds tolerance {tolerance:e}")]
    AsymmetryTooLarge { asymmetry: f64, tolerance: f64 },

    #[error(
        "noise covariance of the {block} block is singular (smallest eigenvalue {min_eigenvalue:e}); \
         rerun with --ridge-jitter to add a small ridge"
    )]
    SingularNoise { block: &'static str, min_eigenvalue: f64 },

    #[error("conditional covariance is numerically singular: mutual information is unbounded")]
    SingularConditional,

    #[error("covariance argument is singular or not positive definite")]
    SingularCovariance,

    #[error("weight matrix of the deficiency program is singular")]
    SingularWeight,

    #[error("solver did not converge after {iterations} iterations (residual {residual:e})")]
    NotConverged { iterations: usize, residual: f64 },

    #[error("numerical breakdown in solver: {0}")]
    NumericalBreakdown(String),

    #[error("channel noise estimate has eigenvalue {min_eigenvalue:e} below the clamp floor {floor:e}")]
    InfeasibleSigma { min_eigenvalue: f64, floor: f64 },

    #[error("composite channel covariance is singular")]
    SingularComposite,

    #[error("the requested channel is not degraded")]
    NotDegraded,

    #[error("degradation witness failed verification: {0}")]
    WitnessVerificationFailed(String),

    #[error("total mutual information {0:e} is too small to normalize")]
    DegenerateTotalMI(f64),

    #[error("no records to summarize")]
    EmptyInput,

    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
