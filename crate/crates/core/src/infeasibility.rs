//! Infeasibility certificates recovered from the iterates.
//!
//! On an infeasible or unbounded LP the displacement `T(z) - z` converges to
//! the infimal displacement vector `v = (v_x, v_y)`. Its dual part is a Farkas
//! certificate of primal infeasibility and its primal part is an unbounded ray
//! certifying dual infeasibility. Two estimators are used for a Halpern
//! sequence: `(2/k)(z^k - z^0)` and `T(z^k) - z^k`.
//!
//! The validators accept either sign of the candidate and report which one
//! passed; the sign of `v_y` produced by the update rule is the negation of the
//! conventional certificate in the primal-infeasible case.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{norm2, spmv, spmv_transpose, StandardFormLp};
use crate::pdhg::Iterate;

pub const DEFAULT_CERTIFICATE_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CandidateSource {
    NormalizedIterate,
    IterateDifference,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CertificateCandidate {
    pub v_x: Vec<f64>,
    pub v_y: Vec<f64>,
    pub source: CandidateSource,
    pub at_iteration: u64,
}

impl CertificateCandidate {
    pub fn as_iterate(&self) -> Iterate {
        Iterate::new(self.v_x.clone(), self.v_y.clone())
    }

    pub fn max_abs(&self) -> f64 {
        self.v_x
            .iter()
            .chain(&self.v_y)
            .fold(0.0, |a: f64, v| a.max(v.abs()))
    }
}

/// Builds both estimators of the infimal displacement vector from a Halpern
/// iterate `z_k`, its anchor `z_0` and `T(z_k)`.
pub fn extract_candidates(
    z_k: &Iterate,
    z_0: &Iterate,
    tz_k: &Iterate,
    k: u64,
    at_iteration: u64,
) -> Result<[CertificateCandidate; 2]> {
    if k == 0 {
        return Err(Error::InvalidConfig(
            "normalized-iterate estimator needs k >= 1".into(),
        ));
    }
    let normalized = z_k.sub(z_0).scaled(2.0 / k as f64);
    Ok([
        CertificateCandidate {
            v_x: normalized.x,
            v_y: normalized.y,
            source: CandidateSource::NormalizedIterate,
            at_iteration,
        },
        difference_candidate(z_k, tz_k, at_iteration),
    ])
}

/// `T(z) - z`.
pub fn difference_candidate(z: &Iterate, tz: &Iterate, at_iteration: u64) -> CertificateCandidate {
    let d = tz.sub(z);
    CertificateCandidate {
        v_x: d.x,
        v_y: d.y,
        source: CandidateSource::IterateDifference,
        at_iteration,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    AsIs,
    Negated,
}

impl Orientation {
    pub fn sign(self) -> f64 {
        match self {
            Orientation::AsIs => 1.0,
            Orientation::Negated => -1.0,
        }
    }
}

/// Outcome of checking one Farkas system for one candidate vector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FarkasCheck {
    /// Relative violation of the homogeneous inequalities.
    pub residual: f64,
    /// Normalized objective margin; must be positive.
    pub margin: f64,
    pub orientation: Orientation,
    pub valid: bool,
}

/// Validation of a candidate as a primal- and/or dual-infeasibility certificate.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct FarkasReport {
    /// `{Aᵀy ≤ 0, bᵀy > 0}` for `y = ±v_y`.
    pub primal: Option<FarkasCheck>,
    /// `{Au = 0, u ≥ 0, cᵀu < 0}` for `u = ±v_x`.
    pub dual: Option<FarkasCheck>,
}

impl FarkasReport {
    pub fn primal_valid(&self) -> bool {
        self.primal.is_some_and(|c| c.valid)
    }

    pub fn dual_valid(&self) -> bool {
        self.dual.is_some_and(|c| c.valid)
    }

    pub fn primal_cert_residual(&self) -> Option<f64> {
        self.primal.map(|c| c.residual)
    }

    pub fn dual_cert_residual(&self) -> Option<f64> {
        self.dual.map(|c| c.residual)
    }
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |a: f64, x| a.max(x.abs()))
}

fn ratio(num: f64, den: f64) -> f64 {
    if num == 0.0 {
        0.0
    } else if den > 0.0 {
        num / den
    } else {
        f64::INFINITY
    }
}

fn pick(checks: [FarkasCheck; 2]) -> FarkasCheck {
    let [a, b] = checks;
    match (a.valid, b.valid) {
        (true, _) => a,
        (false, true) => b,
        _ if b.margin > a.margin => b,
        _ => a,
    }
}

/// Checks `s·v_y` for `s = ±1` as a certificate that `{Ax = b, x ≥ 0}` is empty:
/// `‖[s·Aᵀv_y]⁺‖∞ ≤ tol·‖v_y‖∞·‖A‖` and `bᵀ(s·v_y) ≥ tol·‖v_y‖₂·‖b‖₂ > 0`.
pub fn validate_primal_infeasibility(
    v_y: &[f64],
    lp: &StandardFormLp,
    tol: f64,
) -> Result<FarkasReport> {
    let aty = spmv_transpose(lp.a(), v_y)?;
    let scale = max_abs(v_y) * lp.norm_estimate();
    let vb = norm2(v_y) * norm2(lp.b());
    let bty: f64 = lp.b().iter().zip(v_y).map(|(b, y)| b * y).sum();
    let check = |o: Orientation| {
        let s = o.sign();
        let viol = aty.iter().fold(0.0, |a: f64, g| a.max((s * g).max(0.0)));
        let residual = ratio(viol, scale);
        let margin = if vb > 0.0 { s * bty / vb } else { 0.0 };
        FarkasCheck {
            residual,
            margin,
            orientation: o,
            valid: vb > 0.0 && residual <= tol && margin >= tol && margin > 0.0,
        }
    };
    Ok(FarkasReport {
        primal: Some(pick([check(Orientation::AsIs), check(Orientation::Negated)])),
        dual: None,
    })
}

/// Checks `s·v_x` for `s = ±1` as an unbounded ray:
/// `‖A·s v_x‖∞ ≤ tol·‖v_x‖∞·‖A‖`, `‖[-s v_x]⁺‖∞ ≤ tol·‖v_x‖∞` and
/// `cᵀ(s v_x) ≤ -tol·‖v_x‖₂·max(1, ‖c‖₂) < 0`.
pub fn validate_dual_infeasibility(
    v_x: &[f64],
    lp: &StandardFormLp,
    tol: f64,
) -> Result<FarkasReport> {
    let av = spmv(lp.a(), v_x)?;
    let vmax = max_abs(v_x);
    let a_res = ratio(max_abs(&av), vmax * lp.norm_estimate());
    let vn = norm2(v_x) * norm2(lp.c()).max(1.0);
    let ctv: f64 = lp.c().iter().zip(v_x).map(|(c, x)| c * x).sum();
    let check = |o: Orientation| {
        let s = o.sign();
        let neg = v_x.iter().fold(0.0, |a: f64, x| a.max((-s * x).max(0.0)));
        let residual = a_res.max(ratio(neg, vmax));
        let margin = if vmax > 0.0 { -s * ctv / vn } else { 0.0 };
        FarkasCheck {
            residual,
            margin,
            orientation: o,
            valid: vmax > 0.0 && residual <= tol && margin >= tol && margin > 0.0,
        }
    };
    Ok(FarkasReport {
        primal: None,
        dual: Some(pick([check(Orientation::AsIs), check(Orientation::Negated)])),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Feasibility {
    Feasible,
    PrimalInfeasible,
    DualInfeasible,
    PrimalDualInfeasible,
    Undetermined,
}

/// A validated certificate, oriented so the textbook Farkas system holds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    /// `y` with `Aᵀy ≤ 0`, `bᵀy > 0`.
    pub dual_ray: Option<Vec<f64>>,
    /// `u` with `Au = 0`, `u ≥ 0`, `cᵀu < 0`.
    pub primal_ray: Option<Vec<f64>>,
    pub report: FarkasReport,
    pub source: CandidateSource,
    pub at_iteration: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Classification {
    pub feasibility: Feasibility,
    pub certificate: Option<Certificate>,
}

/// Validates every candidate against both Farkas systems and combines the
/// results.
pub fn classify(
    candidates: &[CertificateCandidate],
    lp: &StandardFormLp,
    tol: f64,
) -> Result<Classification> {
    let mut primal: Option<(FarkasCheck, &CertificateCandidate)> = None;
    let mut dual: Option<(FarkasCheck, &CertificateCandidate)> = None;
    for cand in candidates {
        if primal.is_none() {
            if let Some(c) = validate_primal_infeasibility(&cand.v_y, lp, tol)?.primal {
                if c.valid {
                    primal = Some((c, cand));
                }
            }
        }
        if dual.is_none() {
            if let Some(c) = validate_dual_infeasibility(&cand.v_x, lp, tol)?.dual {
                if c.valid {
                    dual = Some((c, cand));
                }
            }
        }
    }

    let feasibility = match (&primal, &dual) {
        (Some(_), Some(_)) => Feasibility::PrimalDualInfeasible,
        (Some(_), None) => Feasibility::PrimalInfeasible,
        (None, Some(_)) => Feasibility::DualInfeasible,
        (None, None) => {
            let data = 1.0 + max_abs(lp.b()).max(max_abs(lp.c()));
            if candidates.iter().all(|c| c.max_abs() <= tol * data) {
                Feasibility::Feasible
            } else {
                Feasibility::Undetermined
            }
        }
    };

    let certificate = if primal.is_some() || dual.is_some() {
        let (source, at_iteration) = primal
            .or(dual)
            .map(|(_, c)| (c.source, c.at_iteration))
            .expect("one side is present");
        Some(Certificate {
            dual_ray: primal.map(|(chk, c)| oriented(&c.v_y, chk.orientation)),
            primal_ray: dual.map(|(chk, c)| oriented(&c.v_x, chk.orientation)),
            report: FarkasReport {
                primal: primal.map(|p| p.0),
                dual: dual.map(|d| d.0),
            },
            source,
            at_iteration,
        })
    } else {
        None
    };
    Ok(Classification {
        feasibility,
        certificate,
    })
}

fn oriented(v: &[f64], o: Orientation) -> Vec<f64> {
    let s = o.sign();
    v.iter().map(|x| s * x).collect()
}
