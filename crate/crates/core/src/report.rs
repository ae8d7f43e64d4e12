//! JSON solution reports and CSV traces.
//!
//! Floats are written with 17 significant digits, so a report parses back
//! bit for bit. Non-finite values are written as the strings `"inf"`,
//! `"-inf"` and `"nan"`. Keys appear in declaration order; wall-clock data
//! lives under `timing` alone and can be left out for reproducibility checks.

use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::diagnostics::TraceRecord;
use crate::infeasibility::{CandidateSource, Certificate, FarkasCheck, Orientation};
use crate::model::{GeneralFormLp, StandardFormLp, VariableMap};
use crate::pdhg::KktError;
use crate::solver::{SolveResult, Status};

/// Formats finite values with 17 significant digits.
pub fn format_f64(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v == f64::INFINITY {
        "inf".into()
    } else if v == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{v:.16e}")
    }
}

#[derive(Clone, Copy)]
struct JsonF64(f64);

impl Serialize for JsonF64 {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.0.is_finite() {
            let n = serde_json::Number::from_str(&format_f64(self.0)).map_err(serde::ser::Error::custom)?;
            n.serialize(s)
        } else {
            s.serialize_str(&format_f64(self.0))
        }
    }
}

impl<'de> Deserialize<'de> for JsonF64 {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error as _;
        match serde_json::Value::deserialize(d)? {
            serde_json::Value::Number(n) => n
                .as_f64()
                .map(JsonF64)
                .ok_or_else(|| D::Error::custom(format!("number {n} out of range"))),
            serde_json::Value::String(s) => match s.as_str() {
                "inf" => Ok(JsonF64(f64::INFINITY)),
                "-inf" => Ok(JsonF64(f64::NEG_INFINITY)),
                "nan" => Ok(JsonF64(f64::NAN)),
                _ => Err(D::Error::custom(format!("invalid float `{s}`"))),
            },
            other => Err(D::Error::custom(format!("expected a float, got {other}"))),
        }
    }
}

mod float {
    use super::*;

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        JsonF64(*v).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        JsonF64::deserialize(d).map(|v| v.0)
    }
}

mod float_vec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &Option<Vec<f64>>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(v) => s.collect_seq(v.iter().map(|x| JsonF64(*x))),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Vec<f64>>, D::Error> {
        Ok(Option::<Vec<JsonF64>>::deserialize(d)?.map(|v| v.into_iter().map(|x| x.0).collect()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KktReport {
    #[serde(with = "float")]
    pub primal_residual: f64,
    #[serde(with = "float")]
    pub dual_residual: f64,
    #[serde(with = "float")]
    pub gap_residual: f64,
    #[serde(with = "float")]
    pub max_relative: f64,
}

impl From<KktError> for KktReport {
    fn from(k: KktError) -> Self {
        Self {
            primal_residual: k.primal_residual,
            dual_residual: k.dual_residual,
            gap_residual: k.gap_residual,
            max_relative: k.max_relative,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    #[serde(with = "float")]
    pub residual: f64,
    #[serde(with = "float")]
    pub margin: f64,
    pub orientation: Orientation,
    pub valid: bool,
}

impl From<FarkasCheck> for CheckReport {
    fn from(c: FarkasCheck) -> Self {
        Self {
            residual: c.residual,
            margin: c.margin,
            orientation: c.orientation,
            valid: c.valid,
        }
    }
}

/// Vectors are in the standard-form space the solver works in.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateReport {
    /// `y` with `Aᵀy ≤ 0`, `bᵀy > 0`.
    #[serde(with = "float_vec")]
    pub dual_ray: Option<Vec<f64>>,
    /// `u ≥ 0` with `Au = 0`, `cᵀu < 0`.
    #[serde(with = "float_vec")]
    pub primal_ray: Option<Vec<f64>>,
    pub primal_check: Option<CheckReport>,
    pub dual_check: Option<CheckReport>,
    pub source: CandidateSource,
    pub at_iteration: u64,
}

impl From<&Certificate> for CertificateReport {
    fn from(c: &Certificate) -> Self {
        Self {
            dual_ray: c.dual_ray.clone(),
            primal_ray: c.primal_ray.clone(),
            primal_check: c.report.primal.map(Into::into),
            dual_check: c.report.dual.map(Into::into),
            source: c.source,
            at_iteration: c.at_iteration,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionVectors {
    /// Primal values of the original variables.
    #[serde(with = "float_vec")]
    pub x: Option<Vec<f64>>,
    /// Standard-form dual iterate.
    #[serde(with = "float_vec")]
    pub y: Option<Vec<f64>>,
}

/// Settings the run was made with.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub scheme: String,
    pub restart: String,
    #[serde(with = "float")]
    pub tolerance: f64,
    pub iteration_limit: u64,
    #[serde(with = "float")]
    pub time_limit_seconds: f64,
    #[serde(with = "float")]
    pub eta: f64,
    pub infeasibility_check_period: u64,
    #[serde(with = "float")]
    pub certificate_tolerance: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    #[serde(with = "float")]
    pub wall_seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionReport {
    pub problem: String,
    pub status: Status,
    #[serde(with = "float")]
    pub primal_objective: f64,
    #[serde(with = "float")]
    pub dual_objective: f64,
    pub kkt: KktReport,
    pub iterations: u64,
    pub epochs: u64,
    pub spmv_count: u64,
    pub vectors_elided: bool,
    pub solution: Option<SolutionVectors>,
    pub certificate: Option<CertificateReport>,
    pub config: ConfigEcho,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub timing: Option<Timing>,
}

impl SolutionReport {
    /// Builds a report for a solve of `lp`. With `original`, objectives and
    /// the primal vector are mapped back to the original variables.
    pub fn from_result(
        problem: &str,
        result: &SolveResult,
        lp: &StandardFormLp,
        original: Option<(&GeneralFormLp, &VariableMap)>,
        config: ConfigEcho,
    ) -> Self {
        let mut primal = result.primal_objective(lp);
        let mut dual = result.dual_objective(lp);
        let mut x = result.iterate.x.clone();
        if let Some((_, map)) = original {
            primal = map.original_objective(primal);
            dual = map.original_objective(dual);
            x = map.recover_primal(&result.iterate.x);
        }
        let (solution, certificate) = match &result.certificate {
            Some(c) if result.status.is_infeasible() => (None, Some(CertificateReport::from(c))),
            _ => (
                Some(SolutionVectors {
                    x: Some(x),
                    y: Some(result.iterate.y.clone()),
                }),
                None,
            ),
        };
        Self {
            problem: problem.to_string(),
            status: result.status,
            primal_objective: primal,
            dual_objective: dual,
            kkt: result.kkt.into(),
            iterations: result.iterations,
            epochs: result.epochs.len() as u64,
            spmv_count: result.spmv_count,
            vectors_elided: false,
            solution,
            certificate,
            config,
            timing: Some(Timing {
                wall_seconds: result.wall_time.as_secs_f64(),
            }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct JsonOptions {
    /// Vectors longer than this are replaced by `null` and
    /// `vectors_elided` is set.
    pub max_vector_len: Option<usize>,
    pub include_timing: bool,
}

impl Default for JsonOptions {
    fn default() -> Self {
        Self {
            max_vector_len: None,
            include_timing: true,
        }
    }
}

fn elide(v: &mut Option<Vec<f64>>, limit: usize) -> bool {
    if v.as_ref().is_some_and(|v| v.len() > limit) {
        *v = None;
        true
    } else {
        false
    }
}

pub fn write_solution_json(report: &SolutionReport, opts: JsonOptions) -> String {
    let mut r = report.clone();
    if let Some(limit) = opts.max_vector_len {
        let mut elided = false;
        if let Some(s) = &mut r.solution {
            elided |= elide(&mut s.x, limit);
            elided |= elide(&mut s.y, limit);
        }
        if let Some(c) = &mut r.certificate {
            elided |= elide(&mut c.dual_ray, limit);
            elided |= elide(&mut c.primal_ray, limit);
        }
        r.vectors_elided |= elided;
    }
    if !opts.include_timing {
        r.timing = None;
    }
    let mut s = serde_json::to_string_pretty(&r).expect("report serializes");
    s.push('\n');
    s
}

pub fn parse_solution_json(text: &str) -> serde_json::Result<SolutionReport> {
    serde_json::from_str(text)
}

pub const TRACE_CSV_HEADER: &str = "iteration,epoch,inner,fixed_point_residual,primal_residual,dual_residual,gap_residual,max_relative_kkt,n_nonbasic,n_basic_nondegenerate,n_basic_degenerate,normalized_candidate_norm,difference_candidate_norm,wall_seconds";

pub fn write_trace_csv(trace: &[TraceRecord]) -> String {
    let mut out = String::from(TRACE_CSV_HEADER);
    out.push('\n');
    for r in trace {
        let [n, b1, b2] = r.partition.sizes();
        let normalized = r.normalized_candidate_norm.map(format_f64).unwrap_or_default();
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            r.iteration,
            r.epoch,
            r.inner,
            format_f64(r.fixed_point_residual),
            format_f64(r.kkt.primal_residual),
            format_f64(r.kkt.dual_residual),
            format_f64(r.kkt.gap_residual),
            format_f64(r.kkt.max_relative),
            n,
            b1,
            b2,
            normalized,
            format_f64(r.difference_candidate_norm),
            format_f64(r.wall_seconds),
        )
        .expect("writing to a String");
    }
    out
}
