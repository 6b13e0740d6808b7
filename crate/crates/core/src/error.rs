use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{context}: dimension mismatch (expected {expected}, found {found})")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("non-finite value in {context}")]
    NonFinite { context: String },
    #[error("eigensolver did not converge after {sweeps} sweeps")]
    NotConverged { sweeps: usize },
    #[error("matrix is not positive definite (pivot {pivot:e} at index {index})")]
    NotPositiveDefinite { pivot: f64, index: usize },
    #[error("degenerate frame at parameter point {param:?}")]
    DegeneratePoint { param: Vec<f64> },
    #[error("coefficient normalization violated at {point:?}: |Σaᵢ² − 1| = {residual:e}")]
    Normalization { point: Vec<f64>, residual: f64 },
    #[error(
        "structures {first} and {second} do not anti-commute at {point:?} (residual {residual:e})"
    )]
    NotAntiCommuting {
        first: usize,
        second: usize,
        point: Vec<f64>,
        residual: f64,
    },
    #[error("induced structure undefined at {param:?}: {reason}")]
    UndefinedStructure { param: Vec<f64>, reason: String },
    #[error("{0}")]
    Invalid(String),
}
