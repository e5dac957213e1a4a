use alloc::string::String;

/// Errors raised by grid, matrix, and discretization constructors.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("node count must be even and at least 2, got {0}")]
    InvalidNodeCount(usize),

    #[error("period must be positive and finite, got {0}")]
    InvalidPeriod(f64),

    #[error("length mismatch for {what}: expected {expected}, got {actual}")]
    LengthMismatch {
        what: &'static str,
        expected: usize,
        actual: usize,
    },

    #[error("evaluation point {point} lies outside (0, {period}]")]
    PointOutOfRange { point: f64, period: f64 },

    #[error(
        "evaluation point {point} coincides with grid node {node}; use the corresponding square-matrix row instead"
    )]
    PointOnNode { point: f64, node: usize },

    #[error("node index {index} out of range for N = {n}")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("error bound degenerates to zero for an entire (beta = infinity) function; the quadrature is exact up to roundoff")]
    EntireFunction,

    #[error("problem validation failed: {0}")]
    Validation(String),
}

pub type Result<T> = core::result::Result<T, Error>;
