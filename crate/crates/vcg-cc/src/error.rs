use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("quadrature did not converge: estimate {estimate}, error bound {error_bound}")]
    QuadratureNonConvergence { estimate: f64, error_bound: f64 },

    #[error("malformed curve data: {0}")]
    CurveFormat(String),

    #[error("derivative denominator is numerically singular at q* = {qstar}")]
    SingularDenominator { qstar: f64 },

    #[error("refinement budget exhausted before certification (min margin {min_margin} at r = {at_r})")]
    Uncertified { min_margin: f64, at_r: f64 },

    #[error("additional-buyer ceiling {ceiling} reached without certification")]
    KCeiling { ceiling: u64 },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
