use num_complex::Complex64;
use thiserror::Error;

use crate::solvers::SolveReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("node index {index} out of range for a curve with {len} nodes")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("invalid cone configuration: {0}")]
    InvalidCone(String),

    #[error("cone depth {depth:.6e} exceeds the curve reach {reach:.6e}")]
    DepthExceedsReach { depth: f64, reach: f64 },

    #[error("point {z} lies within {distance:.3e} of the boundary (minimum {minimum:.3e})")]
    TooClose { z: Complex64, distance: f64, minimum: f64 },

    #[error("point {z} is not inside the domain")]
    Exterior { z: Complex64 },

    #[error("boundary function is sampled on a different curve")]
    CurveMismatch,

    #[error("expected {expected} samples, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("non-finite sample at node {0}")]
    NonFinite(usize),

    #[error("norm exponent must be >= 1, got {0}")]
    InvalidExponent(f64),

    #[error("polygon side {side} has {nodes} nodes; at least {required} are required")]
    SideTooShort { side: usize, nodes: usize, required: usize },

    #[error("compatibility: {condition} = {} (threshold {threshold:.1e})", show_margin(*.margin))]
    Compatibility { condition: &'static str, integral: Complex64, margin: f64, threshold: f64 },

    #[error("membership rejected: residual {:.3e} exceeds tolerance {:.1e}", .0.residual, .0.tolerance)]
    Rejected(Box<SolveReport>),

    #[error("unknown manufactured case `{0}`")]
    UnknownCase(String),

    #[error("at N = {size}: {source}")]
    AtSize { size: usize, source: Box<Error> },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("csv: {0}")]
    Csv(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Margins at roundoff level are shown as an exact zero.
fn show_margin(margin: f64) -> String {
    if margin.abs() < 1e-12 {
        "0".to_string()
    } else {
        format!("{margin:.3e}")
    }
}
