//! Restarted Halpern PDHG for linear programs.
//!
//! Problems are solved in standard form `min cᵀx s.t. Ax = b, x ≥ 0` through
//! the saddle formulation `min_{x≥0} max_y cᵀx + yᵀAx - bᵀy`. General-form
//! problems (read from MPS) are converted with [`to_standard_form`].

pub mod baselines;
pub mod bench;
pub mod diagnostics;
mod error;
pub mod infeasibility;
pub mod model;
pub mod mps;
pub mod pdhg;
pub mod report;
pub mod solver;

pub use error::{Error, Result};
pub use model::{
    estimate_spectral_norm, spmv, spmv_transpose, to_standard_form, GeneralFormLp, SparseMatrix,
    StandardFormLp, VariableMap,
};
pub use mps::{normalized_format, parse_mps, parse_mps_with, write_mps, write_mps_with, MpsError, MpsErrorKind, MpsFormat};
pub use pdhg::{Iterate, KktError, PdhgOperator, Projection, StepSize};
pub use solver::{solve, solve_observed, RestartScheme, SolveResult, SolverConfig, Status};
