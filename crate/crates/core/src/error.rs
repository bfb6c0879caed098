use thiserror::Error;

/// Errors raised by the estimation, simulation and fitting routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum TailError {
    #[error("parameter {values:?} is outside the domain of {family}")]
    ThetaOutOfDomain { family: &'static str, values: Vec<f64> },
    #[error("stable tail dependence parameter out of range: {0}")]
    ParamOutOfRange(String),
    #[error("spatial parameter out of domain: {0}")]
    ParamOutOfDomain(String),
    #[error("non-finite input at row {row}, column {col}")]
    NonFiniteInput { row: usize, col: usize },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("no joint exceedance at the requested level (denominator is zero)")]
    ZeroDenominator,
    #[error("target effective sample size m={m} is unreachable (at most {max_count} joint exceedances)")]
    Unreachable { m: usize, max_count: usize },
    #[error("model moment vector is identically zero")]
    ZeroModelVector,
    #[error("no joint tail data inside the weight support")]
    NoTailData,
    #[error("Jacobian is singular (JᵀJ not invertible)")]
    SingularJ,
    #[error("plug-in covariance is not available for family {0}")]
    UnsupportedFamily(&'static str),
    #[error("spatial parameters are not identifiable: {0}")]
    Underidentified(String),
    #[error("profiled scale is not positive for pair ({0}, {1})")]
    NonPositiveZeta(usize, usize),
    #[error("no usable location pair")]
    SpatialNoData,
    #[error("bisection failed to bracket the conditional quantile")]
    BisectionFailure,
    #[error("Cholesky factorization failed for location {0}")]
    CholeskyFailure(usize),
    #[error("weight scheme invalid: {0}")]
    InvalidWeights(String),
    #[error("I/O error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, TailError>;

impl From<std::io::Error> for TailError {
    fn from(e: std::io::Error) -> Self {
        TailError::Io(e.to_string())
    }
}

impl From<csv::Error> for TailError {
    fn from(e: csv::Error) -> Self {
        TailError::Io(e.to_string())
    }
}
