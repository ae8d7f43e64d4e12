use crate::error::{Error, Result};
use crate::model::SparseMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Sense {
    #[default]
    Minimize,
    Maximize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub name: String,
    pub relation: Relation,
    pub rhs: f64,
    pub range: Option<f64>,
}

impl Row {
    /// Activity interval `[lo, hi]` of the row.
    ///
    /// A range on an `L` row gives `[rhs - |r|, rhs]`, on a `G` row
    /// `[rhs, rhs + |r|]`, and on an `E` row the sign of `r` picks the side.
    pub fn bounds(&self) -> (f64, f64) {
        let rhs = self.rhs;
        match (self.relation, self.range) {
            (Relation::Le, None) => (f64::NEG_INFINITY, rhs),
            (Relation::Ge, None) => (rhs, f64::INFINITY),
            (Relation::Eq, None) => (rhs, rhs),
            (Relation::Le, Some(r)) => (rhs - r.abs(), rhs),
            (Relation::Ge, Some(r)) => (rhs, rhs + r.abs()),
            (Relation::Eq, Some(r)) if r >= 0.0 => (rhs, rhs + r),
            (Relation::Eq, Some(r)) => (rhs + r, rhs),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Column {
    pub name: String,
    pub cost: f64,
    pub lower: f64,
    pub upper: f64,
}

/// LP with row relations, ranges and variable bounds, as read from a file.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneralFormLp {
    pub name: String,
    pub sense: Sense,
    pub objective_name: String,
    pub objective_constant: f64,
    pub rows: Vec<Row>,
    pub columns: Vec<Column>,
    /// `rows.len() x columns.len()` constraint matrix.
    pub matrix: SparseMatrix,
}

impl GeneralFormLp {
    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_cols(&self) -> usize {
        self.columns.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.matrix.n_rows() != self.rows.len() {
            return Err(Error::DimensionMismatch {
                context: "general-form rows",
                expected: self.rows.len(),
                actual: self.matrix.n_rows(),
            });
        }
        if self.matrix.n_cols() != self.columns.len() {
            return Err(Error::DimensionMismatch {
                context: "general-form columns",
                expected: self.columns.len(),
                actual: self.matrix.n_cols(),
            });
        }
        for c in &self.columns {
            if c.lower > c.upper || c.lower == f64::INFINITY || c.upper == f64::NEG_INFINITY {
                return Err(Error::InconsistentBounds {
                    name: c.name.clone(),
                    lower: c.lower,
                    upper: c.upper,
                });
            }
            if !c.cost.is_finite() || c.lower.is_nan() || c.upper.is_nan() {
                return Err(Error::NonFinite("column data"));
            }
        }
        if self
            .rows
            .iter()
            .any(|r| !r.rhs.is_finite() || r.range.is_some_and(|v| !v.is_finite()))
        {
            return Err(Error::NonFinite("row data"));
        }
        if !self.objective_constant.is_finite() {
            return Err(Error::NonFinite("objective constant"));
        }
        Ok(())
    }

    /// `cᵀx + c₀` in the problem's own sense.
    pub fn objective_value(&self, x: &[f64]) -> f64 {
        self.columns
            .iter()
            .zip(x)
            .map(|(c, v)| c.cost * v)
            .sum::<f64>()
            + self.objective_constant
    }

    pub fn row_activity(&self, x: &[f64]) -> Result<Vec<f64>> {
        crate::model::spmv(&self.matrix, x)
    }

    /// Largest violation of row or column bounds at `x`.
    pub fn max_violation(&self, x: &[f64]) -> Result<f64> {
        let act = self.row_activity(x)?;
        let mut worst: f64 = 0.0;
        for (row, a) in self.rows.iter().zip(&act) {
            let (lo, hi) = row.bounds();
            worst = worst.max(lo - a).max(a - hi);
        }
        for (col, &v) in self.columns.iter().zip(x) {
            worst = worst.max(col.lower - v).max(v - col.upper);
        }
        Ok(worst)
    }
}
