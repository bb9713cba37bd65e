use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    #[error("segment {segment} touches {endpoint} but declares no endpoint exponent")]
    MissingExponentMetadata {
        segment: usize,
        endpoint: &'static str,
    },

    #[error(
        "quadrature did not reach tolerance: value {value:e}, error estimate {error_estimate:e} \
         after {subdivisions} subdivisions"
    )]
    QuadratureFailure {
        value: f64,
        error_estimate: f64,
        subdivisions: usize,
    },

    #[error("|f|^p is not integrable at infinity (decay power {power} with p = {p}); supply a truncation radius")]
    NonIntegrableAtInfinity { power: f64, p: f64 },

    #[error("divergent integral: {0}")]
    DivergentIntegral(String),

    #[error("parameter out of range: {0}")]
    ParameterOutOfRange(String),

    #[error("point is not in the upper half-plane: {0}")]
    InvalidPoint(String),

    #[error("invalid function spec: {0}")]
    FunctionSpec(String),

    #[error("non-finite value produced while evaluating {0}")]
    NonFinite(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
