use num_complex::Complex64;
use thiserror::Error;

use crate::geodesic::GeodesicState;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("non-finite value: {0}")]
    NonFinite(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("range error: {0}")]
    Range(String),

    #[error("dPhi/dt_{index} = {value} < 0 at t = {location:?}")]
    NegativeGradient {
        index: usize,
        value: f64,
        location: Vec<f64>,
    },

    #[error("solver failed: {0}")]
    Solver(String),

    #[error("metric is singular or not positive definite at {0:?}")]
    SingularMetric(Vec<Complex64>),

    #[error("step size underflow at tau = {tau}")]
    StepUnderflow {
        tau: f64,
        last: Box<GeodesicState>,
    },

    #[error("degenerate tangent: f1'(z) = f2'(z) = 0 at z = {0}")]
    DegenerateTangent(Complex64),

    #[error("invalid model descriptor: {0}")]
    Descriptor(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
