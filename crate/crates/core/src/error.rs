use thiserror::Error;

use crate::mps::MpsError;

/// Errors raised by model construction, configuration and the kernels.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, got {actual}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        actual: usize,
    },
    #[error("entry ({row}, {col}) is outside a {n_rows}x{n_cols} matrix")]
    IndexOutOfRange {
        row: usize,
        col: usize,
        n_rows: usize,
        n_cols: usize,
    },
    #[error("duplicate matrix entry at ({row}, {col})")]
    DuplicateEntry { row: usize, col: usize },
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("variable {name}: lower bound {lower} exceeds upper bound {upper}")]
    InconsistentBounds { name: String, lower: f64, upper: f64 },
    #[error("step size {eta} violates eta <= 1/(2*||A||) = {limit}")]
    InvalidStepSize { eta: f64, limit: f64 },
    #[error("canonical quadratic form is negative ({0}); step size too large")]
    NegativeQuadraticForm(f64),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Mps(#[from] MpsError),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
