use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::model::{
    estimate_spectral_norm, GeneralFormLp, Sense, SparseMatrix, DEFAULT_POWER_MAX_ITERS,
    DEFAULT_POWER_SEED, DEFAULT_POWER_TOL,
};

/// `min cᵀx  s.t.  Ax = b, x ≥ 0`.
#[derive(Debug, Clone)]
pub struct StandardFormLp {
    a: SparseMatrix,
    b: Vec<f64>,
    c: Vec<f64>,
    norm_estimate: OnceLock<f64>,
}

impl PartialEq for StandardFormLp {
    fn eq(&self, other: &Self) -> bool {
        self.a == other.a && self.b == other.b && self.c == other.c
    }
}

impl StandardFormLp {
    pub fn new(a: SparseMatrix, b: Vec<f64>, c: Vec<f64>) -> Result<Self> {
        if b.len() != a.n_rows() {
            return Err(Error::DimensionMismatch {
                context: "right-hand side",
                expected: a.n_rows(),
                actual: b.len(),
            });
        }
        if c.len() != a.n_cols() {
            return Err(Error::DimensionMismatch {
                context: "cost vector",
                expected: a.n_cols(),
                actual: c.len(),
            });
        }
        if b.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("right-hand side"));
        }
        if c.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("cost vector"));
        }
        Ok(Self {
            a,
            b,
            c,
            norm_estimate: OnceLock::new(),
        })
    }

    /// Convenience constructor from dense rows.
    pub fn from_dense(a: &[Vec<f64>], b: Vec<f64>, c: Vec<f64>) -> Result<Self> {
        let a = if a.is_empty() {
            SparseMatrix::zeros(0, c.len())
        } else {
            SparseMatrix::from_dense(a)?
        };
        Self::new(a, b, c)
    }

    pub fn a(&self) -> &SparseMatrix {
        &self.a
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    pub fn c(&self) -> &[f64] {
        &self.c
    }

    /// Number of constraints `m`.
    pub fn n_rows(&self) -> usize {
        self.a.n_rows()
    }

    /// Number of variables `n`.
    pub fn n_cols(&self) -> usize {
        self.a.n_cols()
    }

    /// Power-iteration estimate of `‖A‖₂` with the default parameters,
    /// inflated by `(1 + tol)` so it bounds the true norm from above. Cached.
    pub fn norm_estimate(&self) -> f64 {
        *self.norm_estimate.get_or_init(|| {
            estimate_spectral_norm(
                &self.a,
                DEFAULT_POWER_TOL,
                DEFAULT_POWER_MAX_ITERS,
                DEFAULT_POWER_SEED,
            ) * (1.0 + DEFAULT_POWER_TOL)
        })
    }

    pub fn objective(&self, x: &[f64]) -> f64 {
        dot(&self.c, x)
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// How an original variable is expressed in standard-form columns.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ColumnMap {
    /// `x = lower + x'`; `upper_slack` is the slack column of `x' + s = upper - lower`.
    Shifted {
        col: usize,
        lower: f64,
        upper_slack: Option<usize>,
    },
    /// `x = upper - x'` for variables bounded only from above.
    Reflected { col: usize, upper: f64 },
    /// `x = x⁺ - x⁻` for free variables.
    Split { pos: usize, neg: usize },
}

/// Slack structure of an original row.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RowMap {
    Equality,
    /// `a·x + sign·s = rhs`.
    Slack { col: usize, sign: f64 },
    /// `a·x - s = lo` and `s + t = hi - lo`.
    Ranged {
        slack: usize,
        upper_slack: usize,
        width: f64,
    },
}

/// Recovers original variables and objective from a standard-form point.
#[derive(Debug, Clone, PartialEq)]
pub struct VariableMap {
    pub columns: Vec<ColumnMap>,
    pub rows: Vec<RowMap>,
    pub n_std_cols: usize,
    pub n_std_rows: usize,
    /// +1 for minimization, -1 when the original problem maximizes.
    pub objective_sign: f64,
    /// Constant added to the standard-form objective (in minimization sense).
    pub objective_constant: f64,
}

impl VariableMap {
    pub fn recover_primal(&self, x_std: &[f64]) -> Vec<f64> {
        self.columns
            .iter()
            .map(|m| match *m {
                ColumnMap::Shifted { col, lower, .. } => lower + x_std[col],
                ColumnMap::Reflected { col, upper } => upper - x_std[col],
                ColumnMap::Split { pos, neg } => x_std[pos] - x_std[neg],
            })
            .collect()
    }

    /// Converts a standard-form objective value to the original objective.
    pub fn original_objective(&self, std_objective: f64) -> f64 {
        self.objective_sign * (std_objective + self.objective_constant)
    }

    /// Maps an original point to standard form, filling in slacks.
    ///
    /// For a feasible original point the result satisfies `Ax = b, x ≥ 0`.
    pub fn lift(&self, g: &GeneralFormLp, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.columns.len() {
            return Err(Error::DimensionMismatch {
                context: "lift",
                expected: self.columns.len(),
                actual: x.len(),
            });
        }
        let mut out = vec![0.0; self.n_std_cols];
        for (m, (&v, col)) in self.columns.iter().zip(x.iter().zip(&g.columns)) {
            match *m {
                ColumnMap::Shifted {
                    col: j,
                    lower,
                    upper_slack,
                } => {
                    out[j] = v - lower;
                    if let Some(s) = upper_slack {
                        out[s] = (col.upper - lower) - out[j];
                    }
                }
                ColumnMap::Reflected { col: j, upper } => out[j] = upper - v,
                ColumnMap::Split { pos, neg } => {
                    out[pos] = v.max(0.0);
                    out[neg] = (-v).max(0.0);
                }
            }
        }
        let act = g.row_activity(x)?;
        for ((m, row), a) in self.rows.iter().zip(&g.rows).zip(act) {
            let (lo, hi) = row.bounds();
            match *m {
                RowMap::Equality => {}
                RowMap::Slack { col, sign } => {
                    out[col] = if sign > 0.0 { hi - a } else { a - lo };
                }
                RowMap::Ranged {
                    slack,
                    upper_slack,
                    width,
                } => {
                    out[slack] = a - lo;
                    out[upper_slack] = width - out[slack];
                }
            }
        }
        Ok(out)
    }
}

/// Reduces a general-form LP to `min cᵀx, Ax = b, x ≥ 0`.
///
/// Column layout: transformed original variables first (two columns for free
/// variables), then row slacks, then slacks of upper-bound rows. Row layout:
/// original rows in order, then range rows, then upper-bound rows.
pub fn to_standard_form(g: &GeneralFormLp) -> Result<(StandardFormLp, VariableMap)> {
    g.validate()?;
    let sign = match g.sense {
        Sense::Minimize => 1.0,
        Sense::Maximize => -1.0,
    };
    let m = g.n_rows();

    let mut cost: Vec<f64> = Vec::new();
    let mut triplets: Vec<(usize, usize, f64)> = Vec::new();
    let mut b: Vec<f64> = g.rows.iter().map(|_| 0.0).collect();
    let mut constant = g.objective_constant;
    let mut col_maps = Vec::with_capacity(g.n_cols());
    // (std column, width) for x' + s = width rows
    let mut pending_upper: Vec<(usize, usize, f64)> = Vec::new();

    for (j, col) in g.columns.iter().enumerate() {
        let entries: Vec<(usize, f64)> = g.matrix.column(j).collect();
        let (l, u) = (col.lower, col.upper);
        if l.is_finite() {
            let k = cost.len();
            cost.push(col.cost);
            for &(i, v) in &entries {
                triplets.push((i, k, v));
                b[i] -= v * l;
            }
            constant += col.cost * l;
            col_maps.push(ColumnMap::Shifted {
                col: k,
                lower: l,
                upper_slack: None,
            });
            if u.is_finite() {
                pending_upper.push((j, k, u - l));
            }
        } else if u.is_finite() {
            let k = cost.len();
            cost.push(-col.cost);
            for &(i, v) in &entries {
                triplets.push((i, k, -v));
                b[i] -= v * u;
            }
            constant += col.cost * u;
            col_maps.push(ColumnMap::Reflected { col: k, upper: u });
        } else {
            let pos = cost.len();
            let neg = pos + 1;
            cost.push(col.cost);
            cost.push(-col.cost);
            for &(i, v) in &entries {
                triplets.push((i, pos, v));
                triplets.push((i, neg, -v));
            }
            col_maps.push(ColumnMap::Split { pos, neg });
        }
    }

    let mut row_maps = Vec::with_capacity(m);
    let mut extra_rows: Vec<(Vec<(usize, f64)>, f64)> = Vec::new();
    for (i, row) in g.rows.iter().enumerate() {
        let (lo, hi) = row.bounds();
        let shift = b[i];
        if lo == hi {
            b[i] = lo + shift;
            row_maps.push(RowMap::Equality);
        } else if lo == f64::NEG_INFINITY {
            let s = cost.len();
            cost.push(0.0);
            triplets.push((i, s, 1.0));
            b[i] = hi + shift;
            row_maps.push(RowMap::Slack { col: s, sign: 1.0 });
        } else if hi == f64::INFINITY {
            let s = cost.len();
            cost.push(0.0);
            triplets.push((i, s, -1.0));
            b[i] = lo + shift;
            row_maps.push(RowMap::Slack { col: s, sign: -1.0 });
        } else {
            let s = cost.len();
            let t = s + 1;
            cost.push(0.0);
            cost.push(0.0);
            triplets.push((i, s, -1.0));
            b[i] = lo + shift;
            extra_rows.push((vec![(s, 1.0), (t, 1.0)], hi - lo));
            row_maps.push(RowMap::Ranged {
                slack: s,
                upper_slack: t,
                width: hi - lo,
            });
        }
    }

    for (j, k, width) in pending_upper {
        let s = cost.len();
        cost.push(0.0);
        extra_rows.push((vec![(k, 1.0), (s, 1.0)], width));
        if let ColumnMap::Shifted { upper_slack, .. } = &mut col_maps[j] {
            *upper_slack = Some(s);
        }
    }

    for (entries, rhs) in extra_rows {
        let i = b.len();
        b.push(rhs);
        triplets.extend(entries.into_iter().map(|(k, v)| (i, k, v)));
    }

    let n_std = cost.len();
    let n_rows = b.len();
    let a = SparseMatrix::from_triplets(n_rows, n_std, &triplets)?;
    let c: Vec<f64> = cost.into_iter().map(|v| sign * v).collect();
    let lp = StandardFormLp::new(a, b, c)?;
    let map = VariableMap {
        columns: col_maps,
        rows: row_maps,
        n_std_cols: n_std,
        n_std_rows: n_rows,
        objective_sign: sign,
        objective_constant: sign * constant,
    };
    Ok((lp, map))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Relation;
    use crate::model::{Column, Row};

    fn single(relation: Relation, rhs: f64, coef: f64, lower: f64, upper: f64) -> GeneralFormLp {
        GeneralFormLp {
            name: "t".into(),
            sense: Sense::Minimize,
            objective_name: "obj".into(),
            objective_constant: 0.0,
            rows: vec![Row {
                name: "r".into(),
                relation,
                rhs,
                range: None,
            }],
            columns: vec![Column {
                name: "x".into(),
                cost: 1.0,
                lower,
                upper,
            }],
            matrix: SparseMatrix::from_triplets(1, 1, &[(0, 0, coef)]).unwrap(),
        }
    }

    #[test]
    fn le_row_gains_slack() {
        let g = single(Relation::Le, 5.0, 1.0, 0.0, f64::INFINITY);
        let (lp, map) = to_standard_form(&g).unwrap();
        assert_eq!(lp.n_cols(), 2);
        assert_eq!(lp.a().triplets(), vec![(0, 0, 1.0), (0, 1, 1.0)]);
        assert_eq!(lp.b(), &[5.0]);
        assert_eq!(map.rows[0], RowMap::Slack { col: 1, sign: 1.0 });
    }

    #[test]
    fn free_variable_round_trip() {
        let g = single(Relation::Eq, -2.0, 1.0, f64::NEG_INFINITY, f64::INFINITY);
        let (lp, map) = to_standard_form(&g).unwrap();
        assert_eq!(lp.n_cols(), 2);
        for x in [-2.0, 0.0, 3.5] {
            let lifted = map.lift(&g, &[x]).unwrap();
            assert!(lifted.iter().all(|&v| v >= 0.0));
            assert_eq!(map.recover_primal(&lifted), vec![x]);
        }
    }

    #[test]
    fn shifted_ge_row_maps_back_to_feasible_point() {
        // 2x >= 3 with x in [1, inf): substitute x = 1 + x', row 2x' - s = 1
        let g = single(Relation::Ge, 3.0, 2.0, 1.0, f64::INFINITY);
        let (lp, map) = to_standard_form(&g).unwrap();
        assert_eq!(lp.b(), &[1.0]);
        // x' = 0.5, s = 0 is a standard-form vertex
        let x_std = vec![0.5, 0.0];
        let ax = crate::model::spmv(lp.a(), &x_std).unwrap();
        assert_eq!(ax, lp.b());
        let x = map.recover_primal(&x_std);
        assert_eq!(x, vec![1.5]);
        assert!(g.max_violation(&x).unwrap() <= 0.0);
        assert_eq!(map.original_objective(lp.objective(&x_std)), 1.5);
    }

    #[test]
    fn upper_bounds_become_rows() {
        let g = single(Relation::Le, 10.0, 1.0, -1.0, 4.0);
        let (lp, map) = to_standard_form(&g).unwrap();
        // x', row slack, bound slack
        assert_eq!(lp.n_cols(), 3);
        assert_eq!(lp.n_rows(), 2);
        assert_eq!(lp.b(), &[11.0, 5.0]);
        let lifted = map.lift(&g, &[2.0]).unwrap();
        assert_eq!(lifted, vec![3.0, 8.0, 2.0]);
    }

    #[test]
    fn inconsistent_bounds_rejected() {
        let g = single(Relation::Le, 1.0, 1.0, 2.0, 1.0);
        assert!(matches!(
            to_standard_form(&g),
            Err(Error::InconsistentBounds { .. })
        ));
    }

    #[test]
    fn maximization_flips_costs() {
        let mut g = single(Relation::Le, 5.0, 1.0, 0.0, f64::INFINITY);
        g.sense = Sense::Maximize;
        g.objective_constant = 2.0;
        let (lp, map) = to_standard_form(&g).unwrap();
        assert_eq!(lp.c(), &[-1.0, 0.0]);
        assert_eq!(map.original_objective(lp.objective(&[5.0, 0.0])), 7.0);
    }
}
