//! Two-stage instrumentation: active-set partition estimates, non-degeneracy
//! metrics and empirical sharpness ratios.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::infeasibility::CertificateCandidate;
use crate::model::{spmv_transpose, StandardFormLp, DEFAULT_POWER_TOL};
use crate::pdhg::{canonical_norm, fixed_point_residual, CanonicalNorm, Iterate, KktError, StepSize};

pub const DEFAULT_TOL_ACTIVE: f64 = 1e-6;

/// Partition `(N, B1, B2)` of the primal coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartitionEstimate {
    /// `N`: positive reduced cost.
    pub nonbasic: Vec<usize>,
    /// `B1`: zero reduced cost, positive value.
    pub basic_nondegenerate: Vec<usize>,
    /// `B2`: everything else (zero reduced cost and zero value).
    pub basic_degenerate: Vec<usize>,
}

impl PartitionEstimate {
    pub fn sizes(&self) -> [usize; 3] {
        [
            self.nonbasic.len(),
            self.basic_nondegenerate.len(),
            self.basic_degenerate.len(),
        ]
    }

    /// Same `N` and `B1` (the identified part).
    pub fn identifies(&self, oracle: &PartitionEstimate) -> bool {
        self.nonbasic == oracle.nonbasic && self.basic_nondegenerate == oracle.basic_nondegenerate
    }
}

/// Classifies coordinates from `x` and the reduced costs `c + Aᵀy`.
pub fn partition_from_reduced_costs(
    x: &[f64],
    reduced: &[f64],
    norm_a: f64,
    tol_active: f64,
) -> PartitionEstimate {
    let rc_tol = tol_active * norm_a.max(f64::MIN_POSITIVE);
    let mut p = PartitionEstimate {
        nonbasic: Vec::new(),
        basic_nondegenerate: Vec::new(),
        basic_degenerate: Vec::new(),
    };
    for (i, (&xi, &rc)) in x.iter().zip(reduced).enumerate() {
        if rc > rc_tol {
            p.nonbasic.push(i);
        } else if rc.abs() <= rc_tol && xi > tol_active {
            p.basic_nondegenerate.push(i);
        } else {
            p.basic_degenerate.push(i);
        }
    }
    p
}

/// `N`: `c_i + (Aᵀy)_i > tol·‖A‖`; `B1`: `|c_i + (Aᵀy)_i| ≤ tol·‖A‖` and
/// `x_i > tol`; otherwise `B2`.
pub fn partition_estimate(z: &Iterate, lp: &StandardFormLp, tol_active: f64) -> Result<PartitionEstimate> {
    let aty = spmv_transpose(lp.a(), &z.y)?;
    let reduced: Vec<f64> = aty.iter().zip(lp.c()).map(|(g, c)| g + c).collect();
    Ok(partition_from_reduced_costs(
        &z.x,
        &reduced,
        lp.norm_estimate(),
        tol_active,
    ))
}

fn spectral_norm(lp: &StandardFormLp) -> f64 {
    lp.norm_estimate() / (1.0 + DEFAULT_POWER_TOL)
}

/// Non-degeneracy metric
/// `δ = min( min_{i∈N} (c_i + (Aᵀy*)_i)/‖A‖₂, min_{i∈B1} x*_i )`.
///
/// Empty sets are skipped; `+∞` when both are empty.
pub fn compute_delta(z_star: &Iterate, p: &PartitionEstimate, lp: &StandardFormLp) -> Result<f64> {
    let aty = spmv_transpose(lp.a(), &z_star.y)?;
    let norm = spectral_norm(lp);
    let from_n = p
        .nonbasic
        .iter()
        .map(|&i| (lp.c()[i] + aty[i]) / norm)
        .fold(f64::INFINITY, f64::min);
    let from_b1 = p
        .basic_nondegenerate
        .iter()
        .map(|&i| z_star.x[i])
        .fold(f64::INFINITY, f64::min);
    Ok(from_n.min(from_b1))
}

/// Partition `(B, N1, N2)` induced by an infimal displacement vector.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DisplacementPartition {
    pub b: Vec<usize>,
    pub n1: Vec<usize>,
    pub n2: Vec<usize>,
}

/// `B = {(v_x)_i > tol}`, `N2 = {(v_x)_i ≤ tol, (Aᵀv_y)_i > tol}`, `N1` the
/// rest; `δ_v = min( min_B (v_x)_i, min_{N2} (Aᵀv_y)_i/‖A‖₂ )`, `+∞` if both
/// sets are empty.
pub fn compute_delta_v(
    v: &CertificateCandidate,
    lp: &StandardFormLp,
    tol: f64,
) -> Result<(DisplacementPartition, f64)> {
    let aty = spmv_transpose(lp.a(), &v.v_y)?;
    let norm = spectral_norm(lp);
    let mut part = DisplacementPartition {
        b: Vec::new(),
        n1: Vec::new(),
        n2: Vec::new(),
    };
    let mut delta = f64::INFINITY;
    for (i, (&vx, &g)) in v.v_x.iter().zip(&aty).enumerate() {
        if vx > tol {
            part.b.push(i);
            delta = delta.min(vx);
        } else if g > tol {
            part.n2.push(i);
            delta = delta.min(g / norm);
        } else {
            part.n1.push(i);
        }
    }
    Ok((part, delta))
}

/// One logged solver iteration.
///
/// `fixed_point_residual` belongs to the iterate `z^{n,k}`; KKT components and
/// the partition are evaluated at `T(z^{n,k})`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub epoch: u64,
    pub inner: u64,
    pub iteration: u64,
    pub fixed_point_residual: f64,
    pub kkt: KktError,
    pub partition: PartitionEstimate,
    /// Canonical norm of `(2/k)(z^{n,k} - z^{n,0})`; `None` at `k = 0`.
    pub normalized_candidate_norm: Option<f64>,
    /// Canonical norm of `T(z^{n,k}) - z^{n,k}`.
    pub difference_candidate_norm: f64,
    pub wall_seconds: f64,
}

/// First logged iteration from which every later record's `(N, B1)` agrees
/// with the oracle partition.
pub fn identification_iteration(trace: &[TraceRecord], oracle: &PartitionEstimate) -> Option<u64> {
    let mut first = None;
    for rec in trace {
        if rec.partition.identifies(oracle) {
            first.get_or_insert(rec.iteration);
        } else {
            first = None;
        }
    }
    first
}

/// Reference optimal points for distance computations on small instances.
///
/// Distances are taken to the nearest listed point, which is the exact
/// distance to `Z*` when the optimum is unique.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimalSet {
    pub points: Vec<Iterate>,
}

impl OptimalSet {
    pub fn single(z: Iterate) -> Self {
        Self { points: vec![z] }
    }

    pub fn distance(&self, z: &Iterate, nrm: &CanonicalNorm<'_>) -> Result<f64> {
        let mut best = f64::INFINITY;
        for p in &self.points {
            best = best.min(canonical_norm(&z.sub(p), nrm)?);
        }
        Ok(best)
    }

    pub fn distance2(&self, z: &Iterate) -> f64 {
        self.points
            .iter()
            .map(|p| z.sub(p).norm2())
            .fold(f64::INFINITY, f64::min)
    }
}

/// Empirical sharpness `‖z - T(z)‖ / dist(z, Z*)` in the canonical norm;
/// `+∞` when `z` is optimal.
pub fn measure_sharpness(
    z: &Iterate,
    lp: &StandardFormLp,
    eta: StepSize,
    oracle: &OptimalSet,
) -> Result<f64> {
    let nrm = CanonicalNorm::new(lp, eta);
    let dist = oracle.distance(z, &nrm)?;
    if dist == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(fixed_point_residual(z, lp, eta, &nrm)? / dist)
}
