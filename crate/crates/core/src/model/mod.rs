//! Problem representation: sparse kernels, the standard-form LP the solver
//! iterates on, and the general-form LP produced by ingestion.

mod general;
mod sparse;
mod standard;

pub use general::{Column, GeneralFormLp, Relation, Row, Sense};
pub use sparse::{
    estimate_spectral_norm, spmv, spmv_transpose, SparseMatrix, DEFAULT_POWER_MAX_ITERS,
    DEFAULT_POWER_SEED, DEFAULT_POWER_TOL,
};
pub(crate) use sparse::norm2;
pub use standard::{to_standard_form, ColumnMap, RowMap, StandardFormLp, VariableMap};
