use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    #[error("total mass {0} is not 1")]
    MassNotNormalized(f64),

    #[error("invalid piecewise-linear function: {0}")]
    InvalidFunction(String),

    #[error("function is not a valid cdf: limits are {left} and {right}, expected 0 and 1")]
    CdfLimits { left: f64, right: f64 },

    #[error("quantile is not non-decreasing")]
    NotMonotone,

    #[error("invalid Riemann data: left state {left} must be below right state {right}")]
    RiemannData { left: f64, right: f64 },

    #[error("state {0} does not lie on the flux grid")]
    OffGrid(f64),

    #[error("front tracking requires piecewise-constant initial data")]
    NotPiecewiseConstant,

    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    #[error(
        "attractive quantile flow from continuous data is exact only up to t = {limit}; requested t = {requested}"
    )]
    ContinuumFlattening { limit: f64, requested: f64 },

    #[error("time must be {0}")]
    InvalidTime(String),

    #[error("invalid test function: {0}")]
    InvalidTestFunction(String),

    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error("invalid sigma {0}, expected 1 or -1")]
    InvalidSigma(i64),
}
