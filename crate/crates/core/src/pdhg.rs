//! The PDHG operator `T`, its canonical norm, the fixed-point residual and the
//! relative KKT error.
//!
//! Saddle form: `min_{x≥0} max_y cᵀx + yᵀAx - bᵀy`, with equal primal and dual
//! step size `η`. One application of `T` is
//!
//! ```text
//! x⁺ = proj₊(x - η(Aᵀy + c))
//! y⁺ = y + η(A(2x⁺ - x) - b)
//! ```
//!
//! The canonical norm is `‖z‖² = zᵀP_η z` with `P_η = [[I/η, -Aᵀ], [-A, I/η]]`.

use std::cell::Cell;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{norm2, SparseMatrix, StandardFormLp};

/// Primal-dual pair `z = (x, y)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Iterate {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

impl Iterate {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Self {
        Self { x, y }
    }

    pub fn zeros(n: usize, m: usize) -> Self {
        Self {
            x: vec![0.0; n],
            y: vec![0.0; m],
        }
    }

    pub fn zeros_for(lp: &StandardFormLp) -> Self {
        Self::zeros(lp.n_cols(), lp.n_rows())
    }

    pub fn sub(&self, other: &Iterate) -> Iterate {
        Iterate {
            x: self.x.iter().zip(&other.x).map(|(a, b)| a - b).collect(),
            y: self.y.iter().zip(&other.y).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn scaled(&self, s: f64) -> Iterate {
        Iterate {
            x: self.x.iter().map(|v| v * s).collect(),
            y: self.y.iter().map(|v| v * s).collect(),
        }
    }

    /// `wa·a + wb·b`.
    pub fn combine(wa: f64, a: &Iterate, wb: f64, b: &Iterate) -> Iterate {
        Iterate {
            x: lincomb(wa, &a.x, wb, &b.x),
            y: lincomb(wa, &a.y, wb, &b.y),
        }
    }

    /// Euclidean norm of the stacked vector.
    pub fn norm2(&self) -> f64 {
        (sq(&self.x) + sq(&self.y)).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.x
            .iter()
            .chain(&self.y)
            .fold(0.0, |acc: f64, v| acc.max(v.abs()))
    }

    pub fn max_abs_diff(&self, other: &Iterate) -> f64 {
        self.x
            .iter()
            .zip(&other.x)
            .chain(self.y.iter().zip(&other.y))
            .fold(0.0, |acc: f64, (a, b)| acc.max((a - b).abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.x.iter().chain(&self.y).all(|v| v.is_finite())
    }

    fn check_dims(&self, lp: &StandardFormLp) -> Result<()> {
        if self.x.len() != lp.n_cols() {
            return Err(Error::DimensionMismatch {
                context: "primal iterate",
                expected: lp.n_cols(),
                actual: self.x.len(),
            });
        }
        if self.y.len() != lp.n_rows() {
            return Err(Error::DimensionMismatch {
                context: "dual iterate",
                expected: lp.n_rows(),
                actual: self.y.len(),
            });
        }
        Ok(())
    }
}

pub(crate) fn lincomb(wa: f64, a: &[f64], wb: f64, b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| wa * x + wb * y).collect()
}

fn sq(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Common step size `τ = σ = η`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepSize(f64);

impl StepSize {
    /// Checks `η ≤ 1/(2·norm_estimate)`. A zero estimate only requires `η > 0`.
    pub fn new(eta: f64, norm_estimate: f64) -> Result<Self> {
        if !(eta.is_finite() && eta > 0.0) {
            return Err(Error::InvalidConfig(format!("step size must be positive, got {eta}")));
        }
        if norm_estimate > 0.0 {
            let limit = 1.0 / (2.0 * norm_estimate);
            if eta > limit * (1.0 + 1e-12) {
                return Err(Error::InvalidStepSize { eta, limit });
            }
        }
        Ok(Self(eta))
    }

    /// Validates `η` against the power-iteration estimate of `‖A‖₂` for `lp`.
    pub fn for_lp(eta: f64, lp: &StandardFormLp) -> Result<Self> {
        Self::new(eta, lp.norm_estimate() / (1.0 + crate::model::DEFAULT_POWER_TOL))
    }

    /// `η = 1/(2·‖A‖est)`, or 1 when `A` is zero.
    pub fn default_for(norm_estimate: f64) -> Self {
        if norm_estimate > 0.0 {
            Self(1.0 / (2.0 * norm_estimate))
        } else {
            Self(1.0)
        }
    }

    pub fn eta(self) -> f64 {
        self.0
    }
}

/// Whether `T` projects the primal step onto `x ≥ 0`. Turning projection off
/// gives PDHG on the unconstrained bilinear saddle problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Projection {
    #[default]
    NonNegative,
    None,
}

/// Applies `T` once. Exactly one `Aᵀy` and one `A·(2x⁺ - x)` product.
pub fn pdhg_step(z: &Iterate, lp: &StandardFormLp, eta: StepSize) -> Result<Iterate> {
    pdhg_step_with(z, lp, eta, Projection::NonNegative)
}

pub fn pdhg_step_with(
    z: &Iterate,
    lp: &StandardFormLp,
    eta: StepSize,
    projection: Projection,
) -> Result<Iterate> {
    z.check_dims(lp)?;
    let eta = eta.eta();
    let a = lp.a();
    let mut aty = vec![0.0; lp.n_cols()];
    a.mul_transpose_vec_into(&z.y, &mut aty);
    let x_next = primal_update(&z.x, &aty, lp.c(), eta, projection);
    let extrapolated: Vec<f64> = x_next.iter().zip(&z.x).map(|(n, o)| 2.0 * n - o).collect();
    let mut a_ext = vec![0.0; lp.n_rows()];
    a.mul_vec_into(&extrapolated, &mut a_ext);
    let y_next = z
        .y
        .iter()
        .zip(a_ext.iter().zip(lp.b()))
        .map(|(y, (ae, b))| y + eta * (ae - b))
        .collect();
    Ok(Iterate::new(x_next, y_next))
}

fn primal_update(x: &[f64], aty: &[f64], c: &[f64], eta: f64, projection: Projection) -> Vec<f64> {
    x.iter()
        .zip(aty.iter().zip(c))
        .map(|(x, (g, c))| {
            let v = x - eta * (g + c);
            match projection {
                Projection::NonNegative => v.max(0.0),
                Projection::None => v,
            }
        })
        .collect()
}

/// Evaluates `‖z‖` in the norm induced by `P_η` without forming `P_η`.
#[derive(Debug, Clone, Copy)]
pub struct CanonicalNorm<'a> {
    a: &'a SparseMatrix,
    eta: f64,
}

impl<'a> CanonicalNorm<'a> {
    pub fn new(lp: &'a StandardFormLp, eta: StepSize) -> Self {
        Self {
            a: lp.a(),
            eta: eta.eta(),
        }
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    /// `√(xᵀx/η - 2yᵀAx + yᵀy/η)` given a precomputed `A·x`.
    pub fn from_product(&self, z: &Iterate, ax: &[f64]) -> Result<f64> {
        let diag = (sq(&z.x) + sq(&z.y)) / self.eta;
        let q = diag - 2.0 * dot(&z.y, ax);
        if q >= 0.0 {
            Ok(q.sqrt())
        } else if q >= -1e-12 * diag {
            Ok(0.0)
        } else {
            Err(Error::NegativeQuadraticForm(q))
        }
    }
}

/// `‖z‖` in the canonical PDHG norm. One `A·x` product.
pub fn canonical_norm(z: &Iterate, nrm: &CanonicalNorm<'_>) -> Result<f64> {
    if z.x.len() != nrm.a.n_cols() || z.y.len() != nrm.a.n_rows() {
        return Err(Error::DimensionMismatch {
            context: "canonical norm",
            expected: nrm.a.n_cols() + nrm.a.n_rows(),
            actual: z.x.len() + z.y.len(),
        });
    }
    let mut ax = vec![0.0; nrm.a.n_rows()];
    nrm.a.mul_vec_into(&z.x, &mut ax);
    nrm.from_product(z, &ax)
}

/// `‖z - T(z)‖` in the canonical norm.
pub fn fixed_point_residual(
    z: &Iterate,
    lp: &StandardFormLp,
    eta: StepSize,
    nrm: &CanonicalNorm<'_>,
) -> Result<f64> {
    let tz = pdhg_step(z, lp, eta)?;
    canonical_norm(&z.sub(&tz), nrm)
}

/// Relative KKT error components.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KktError {
    pub primal_residual: f64,
    pub dual_residual: f64,
    pub gap_residual: f64,
    pub max_relative: f64,
}

impl KktError {
    pub fn new(primal_residual: f64, dual_residual: f64, gap_residual: f64) -> Self {
        Self {
            primal_residual,
            dual_residual,
            gap_residual,
            max_relative: primal_residual.max(dual_residual).max(gap_residual),
        }
    }
}

/// Relative KKT error at `z`:
///
/// * primal: `‖Ax - b‖₂ / (1 + ‖b‖₂)`
/// * dual: `‖[-(c + Aᵀy)]⁺‖₂ / (1 + ‖c‖₂)`
/// * gap: `|cᵀx + bᵀy| / (1 + |cᵀx| + |bᵀy|)`
pub fn kkt_error(z: &Iterate, lp: &StandardFormLp) -> Result<KktError> {
    z.check_dims(lp)?;
    let mut ax = vec![0.0; lp.n_rows()];
    let mut aty = vec![0.0; lp.n_cols()];
    lp.a().mul_vec_into(&z.x, &mut ax);
    lp.a().mul_transpose_vec_into(&z.y, &mut aty);
    Ok(kkt_from_products(z, &ax, &aty, lp))
}

pub(crate) fn kkt_from_products(
    z: &Iterate,
    ax: &[f64],
    aty: &[f64],
    lp: &StandardFormLp,
) -> KktError {
    let primal = ax
        .iter()
        .zip(lp.b())
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt()
        / (1.0 + norm2(lp.b()));
    let dual = aty
        .iter()
        .zip(lp.c())
        .map(|(g, c)| (-(c + g)).max(0.0).powi(2))
        .sum::<f64>()
        .sqrt()
        / (1.0 + norm2(lp.c()));
    let ctx = dot(lp.c(), &z.x);
    let bty = dot(lp.b(), &z.y);
    let gap = (ctx + bty).abs() / (1.0 + ctx.abs() + bty.abs());
    KktError::new(primal, dual, gap)
}

/// An iterate together with its products `A·x` and `Aᵀ·y`.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluated {
    pub z: Iterate,
    pub ax: Vec<f64>,
    pub aty: Vec<f64>,
}

impl Evaluated {
    /// `wa·a + wb·b`, products included (they are linear in `z`).
    pub fn combine(wa: f64, a: &Evaluated, wb: f64, b: &Evaluated) -> Evaluated {
        Evaluated {
            z: Iterate::combine(wa, &a.z, wb, &b.z),
            ax: lincomb(wa, &a.ax, wb, &b.ax),
            aty: lincomb(wa, &a.aty, wb, &b.aty),
        }
    }
}

/// `T` bound to one instance, carrying `A·x` and `Aᵀ·y` along with every
/// iterate so that residuals and KKT errors need no further products.
/// Each [`PdhgOperator::apply`] costs two sparse products.
#[derive(Debug)]
pub struct PdhgOperator<'a> {
    lp: &'a StandardFormLp,
    eta: StepSize,
    projection: Projection,
    products: Cell<u64>,
}

impl<'a> PdhgOperator<'a> {
    pub fn new(lp: &'a StandardFormLp, eta: StepSize) -> Self {
        Self::with_projection(lp, eta, Projection::NonNegative)
    }

    pub fn with_projection(lp: &'a StandardFormLp, eta: StepSize, projection: Projection) -> Self {
        Self {
            lp,
            eta,
            projection,
            products: Cell::new(0),
        }
    }

    pub fn lp(&self) -> &'a StandardFormLp {
        self.lp
    }

    pub fn step_size(&self) -> StepSize {
        self.eta
    }

    pub fn norm(&self) -> CanonicalNorm<'a> {
        CanonicalNorm::new(self.lp, self.eta)
    }

    /// Number of sparse matrix-vector products performed so far.
    pub fn product_count(&self) -> u64 {
        self.products.get()
    }

    pub fn evaluate(&self, z: Iterate) -> Result<Evaluated> {
        z.check_dims(self.lp)?;
        let mut ax = vec![0.0; self.lp.n_rows()];
        let mut aty = vec![0.0; self.lp.n_cols()];
        self.lp.a().mul_vec_into(&z.x, &mut ax);
        self.lp.a().mul_transpose_vec_into(&z.y, &mut aty);
        self.products.set(self.products.get() + 2);
        Ok(Evaluated { z, ax, aty })
    }

    /// `T(z)` with its products.
    pub fn apply(&self, e: &Evaluated) -> Evaluated {
        let eta = self.eta.eta();
        let x = primal_update(&e.z.x, &e.aty, self.lp.c(), eta, self.projection);
        let mut ax = vec![0.0; self.lp.n_rows()];
        self.lp.a().mul_vec_into(&x, &mut ax);
        let y: Vec<f64> = e
            .z
            .y
            .iter()
            .zip(ax.iter().zip(&e.ax))
            .zip(self.lp.b())
            .map(|((y, (an, ao)), b)| y + eta * (2.0 * an - ao - b))
            .collect();
        let mut aty = vec![0.0; self.lp.n_cols()];
        self.lp.a().mul_transpose_vec_into(&y, &mut aty);
        self.products.set(self.products.get() + 2);
        Evaluated {
            z: Iterate::new(x, y),
            ax,
            aty,
        }
    }

    /// Canonical norm of `a - b` from cached products.
    pub fn distance(&self, a: &Evaluated, b: &Evaluated) -> f64 {
        let d = a.z.sub(&b.z);
        let adx: Vec<f64> = a.ax.iter().zip(&b.ax).map(|(p, q)| p - q).collect();
        // eta <= 1/(2‖A‖) keeps the form positive definite; rounding can only
        // push it below zero at the 1e-16 level
        self.norm().from_product(&d, &adx).unwrap_or(0.0)
    }

    pub fn kkt(&self, e: &Evaluated) -> KktError {
        kkt_from_products(&e.z, &e.ax, &e.aty, self.lp)
    }
}
