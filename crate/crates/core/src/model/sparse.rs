//! Compressed sparse storage with both row-major and column-major copies.
//!
//! `A·x` walks the row-compressed copy and `Aᵀ·y` walks the column-compressed
//! copy. Within a row (column) entries are sorted by column (row) index, so the
//! summation order of `spmv_transpose(A, y)` is identical to `spmv(Aᵀ, y)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    n_rows: usize,
    n_cols: usize,
    // CSR
    row_ptr: Vec<usize>,
    row_col: Vec<usize>,
    row_val: Vec<f64>,
    // CSC
    col_ptr: Vec<usize>,
    col_row: Vec<usize>,
    col_val: Vec<f64>,
}

impl SparseMatrix {
    /// Builds a matrix from `(row, col, value)` triplets.
    ///
    /// Duplicate coordinates are rejected rather than summed. Explicit zeros are
    /// kept as stored entries.
    pub fn from_triplets(
        n_rows: usize,
        n_cols: usize,
        triplets: &[(usize, usize, f64)],
    ) -> Result<Self> {
        for &(r, c, v) in triplets {
            if r >= n_rows || c >= n_cols {
                return Err(Error::IndexOutOfRange {
                    row: r,
                    col: c,
                    n_rows,
                    n_cols,
                });
            }
            if !v.is_finite() {
                return Err(Error::NonFinite("matrix entry"));
            }
        }

        let mut by_row: Vec<(usize, usize, f64)> = triplets.to_vec();
        by_row.sort_by_key(|a| (a.0, a.1));
        for w in by_row.windows(2) {
            if w[0].0 == w[1].0 && w[0].1 == w[1].1 {
                return Err(Error::DuplicateEntry {
                    row: w[0].0,
                    col: w[0].1,
                });
            }
        }

        let mut row_ptr = vec![0usize; n_rows + 1];
        for &(r, _, _) in &by_row {
            row_ptr[r + 1] += 1;
        }
        for i in 0..n_rows {
            row_ptr[i + 1] += row_ptr[i];
        }
        let row_col = by_row.iter().map(|t| t.1).collect();
        let row_val = by_row.iter().map(|t| t.2).collect();

        let mut by_col = by_row;
        by_col.sort_by_key(|a| (a.1, a.0));
        let mut col_ptr = vec![0usize; n_cols + 1];
        for &(_, c, _) in &by_col {
            col_ptr[c + 1] += 1;
        }
        for j in 0..n_cols {
            col_ptr[j + 1] += col_ptr[j];
        }
        let col_row = by_col.iter().map(|t| t.0).collect();
        let col_val = by_col.iter().map(|t| t.2).collect();

        Ok(Self {
            n_rows,
            n_cols,
            row_ptr,
            row_col,
            row_val,
            col_ptr,
            col_row,
            col_val,
        })
    }

    /// Builds a matrix from dense rows, storing only the nonzeros.
    pub fn from_dense(rows: &[Vec<f64>]) -> Result<Self> {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, Vec::len);
        let mut triplets = Vec::new();
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n_cols {
                return Err(Error::DimensionMismatch {
                    context: "dense row length",
                    expected: n_cols,
                    actual: row.len(),
                });
            }
            for (j, &v) in row.iter().enumerate() {
                if v != 0.0 {
                    triplets.push((i, j, v));
                }
            }
        }
        Self::from_triplets(n_rows, n_cols, &triplets)
    }

    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        Self::from_triplets(n_rows, n_cols, &[]).expect("empty matrix is valid")
    }

    pub fn identity(n: usize) -> Self {
        let t: Vec<_> = (0..n).map(|i| (i, i, 1.0)).collect();
        Self::from_triplets(n, n, &t).expect("identity is valid")
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn nnz(&self) -> usize {
        self.row_val.len()
    }

    /// Row-major triplets, sorted by (row, col).
    pub fn triplets(&self) -> Vec<(usize, usize, f64)> {
        let mut out = Vec::with_capacity(self.nnz());
        for i in 0..self.n_rows {
            for p in self.row_ptr[i]..self.row_ptr[i + 1] {
                out.push((i, self.row_col[p], self.row_val[p]));
            }
        }
        out
    }

    /// Column-major triplets, sorted by (col, row).
    pub fn column_triplets(&self) -> Vec<(usize, usize, f64)> {
        let mut out = Vec::with_capacity(self.nnz());
        for j in 0..self.n_cols {
            for p in self.col_ptr[j]..self.col_ptr[j + 1] {
                out.push((self.col_row[p], j, self.col_val[p]));
            }
        }
        out
    }

    /// Entries `(row, value)` of column `j`.
    pub fn column(&self, j: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let range = self.col_ptr[j]..self.col_ptr[j + 1];
        self.col_row[range.clone()]
            .iter()
            .copied()
            .zip(self.col_val[range].iter().copied())
    }

    pub fn transpose(&self) -> SparseMatrix {
        SparseMatrix {
            n_rows: self.n_cols,
            n_cols: self.n_rows,
            row_ptr: self.col_ptr.clone(),
            row_col: self.col_row.clone(),
            row_val: self.col_val.clone(),
            col_ptr: self.row_ptr.clone(),
            col_row: self.row_col.clone(),
            col_val: self.row_val.clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.row_val.iter().all(|&v| v == 0.0)
    }

    /// `out = A·x` without allocating. Panics on length mismatch.
    pub fn mul_vec_into(&self, x: &[f64], out: &mut [f64]) {
        assert_eq!(x.len(), self.n_cols);
        assert_eq!(out.len(), self.n_rows);
        for (i, o) in out.iter_mut().enumerate() {
            let mut acc = 0.0;
            for p in self.row_ptr[i]..self.row_ptr[i + 1] {
                acc += self.row_val[p] * x[self.row_col[p]];
            }
            *o = acc;
        }
    }

    /// `out = Aᵀ·y` without allocating. Panics on length mismatch.
    pub fn mul_transpose_vec_into(&self, y: &[f64], out: &mut [f64]) {
        assert_eq!(y.len(), self.n_rows);
        assert_eq!(out.len(), self.n_cols);
        for (j, o) in out.iter_mut().enumerate() {
            let mut acc = 0.0;
            for p in self.col_ptr[j]..self.col_ptr[j + 1] {
                acc += self.col_val[p] * y[self.col_row[p]];
            }
            *o = acc;
        }
    }
}

/// `A·x`.
pub fn spmv(a: &SparseMatrix, x: &[f64]) -> Result<Vec<f64>> {
    if x.len() != a.n_cols {
        return Err(Error::DimensionMismatch {
            context: "spmv",
            expected: a.n_cols,
            actual: x.len(),
        });
    }
    let mut out = vec![0.0; a.n_rows];
    a.mul_vec_into(x, &mut out);
    Ok(out)
}

/// `Aᵀ·y`.
pub fn spmv_transpose(a: &SparseMatrix, y: &[f64]) -> Result<Vec<f64>> {
    if y.len() != a.n_rows {
        return Err(Error::DimensionMismatch {
            context: "spmv_transpose",
            expected: a.n_rows,
            actual: y.len(),
        });
    }
    let mut out = vec![0.0; a.n_cols];
    a.mul_transpose_vec_into(y, &mut out);
    Ok(out)
}

pub const DEFAULT_POWER_TOL: f64 = 1e-4;
pub const DEFAULT_POWER_MAX_ITERS: usize = 5000;
pub const DEFAULT_POWER_SEED: u64 = 0x5eed;

/// Power iteration on `AᵀA` from a seeded random start vector.
///
/// Returns `sqrt` of the final Rayleigh quotient, which never exceeds `‖A‖₂`.
/// Iteration stops once the estimate changes by less than `tol` relative.
/// A zero matrix returns 0.
pub fn estimate_spectral_norm(a: &SparseMatrix, tol: f64, max_iters: usize, seed: u64) -> f64 {
    if a.n_cols == 0 || a.n_rows == 0 || a.is_zero() {
        return 0.0;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v: Vec<f64> = (0..a.n_cols).map(|_| rng.gen_range(0.5..1.5)).collect();
    let mut av = vec![0.0; a.n_rows];
    let mut atav = vec![0.0; a.n_cols];
    normalize(&mut v);

    let mut sigma = 0.0;
    for _ in 0..max_iters.max(1) {
        a.mul_vec_into(&v, &mut av);
        let next = norm2(&av);
        a.mul_transpose_vec_into(&av, &mut atav);
        let w = norm2(&atav);
        if w == 0.0 {
            // start vector landed in the null space; sigma is whatever we had
            break;
        }
        for (vi, &ai) in v.iter_mut().zip(&atav) {
            *vi = ai / w;
        }
        let converged = sigma > 0.0 && (next - sigma).abs() <= tol * next;
        sigma = next;
        if converged {
            break;
        }
    }
    // Rayleigh quotient at the last normalized iterate
    a.mul_vec_into(&v, &mut av);
    sigma.max(norm2(&av))
}

pub(crate) fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn normalize(v: &mut [f64]) {
    let n = norm2(v);
    if n > 0.0 {
        v.iter_mut().for_each(|x| *x /= n);
    }
}
