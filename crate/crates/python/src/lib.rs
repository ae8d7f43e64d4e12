//! Python bindings: `import halpern_lp`.

use std::time::Duration;

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use halpern_lp_core::baselines::{solve_baseline, BaselineMode};
use halpern_lp_core::bench::shifted_geometric_mean as sgm;
use halpern_lp_core::infeasibility::{self, Orientation, DEFAULT_CERTIFICATE_TOL};
use halpern_lp_core::report::{write_solution_json, ConfigEcho, JsonOptions, SolutionReport};
use halpern_lp_core::solver::{DEFAULT_CHECK_PERIOD, DEFAULT_TOLERANCE};
use halpern_lp_core::{
    parse_mps_with, solve as core_solve, to_standard_form, GeneralFormLp, MpsFormat, RestartScheme,
    SolverConfig, StandardFormLp, VariableMap,
};

fn value_error(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse_restart(s: &str) -> Result<RestartScheme, String> {
    match s {
        "adaptive" => Ok(RestartScheme::adaptive()),
        "none" => Ok(RestartScheme::None),
        _ => s
            .strip_prefix("fixed:")
            .and_then(|k| k.parse().ok())
            .map(|k_star| RestartScheme::FixedFrequency { k_star })
            .ok_or_else(|| format!("restart must be adaptive, fixed:K or none, got `{s}`")),
    }
}

fn parse_scheme(s: &str) -> Result<Option<BaselineMode>, String> {
    match s {
        "halpern" => Ok(None),
        "vanilla" => Ok(Some(BaselineMode::Vanilla)),
        "averaged" => Ok(Some(BaselineMode::Averaged)),
        "restarted-average" => Ok(Some(BaselineMode::RestartedAverage)),
        _ => Err(format!(
            "scheme must be halpern, vanilla, averaged or restarted-average, got `{s}`"
        )),
    }
}

fn restart_name(r: &RestartScheme) -> String {
    match r {
        RestartScheme::FixedFrequency { k_star } => format!("fixed:{k_star}"),
        RestartScheme::AdaptiveResidualDecay { .. } => "adaptive".into(),
        RestartScheme::None => "none".into(),
    }
}

/// A linear program, kept both as read and in `min cᵀx, Ax = b, x ≥ 0` form.
#[pyclass(module = "halpern_lp")]
struct Problem {
    general: Option<(GeneralFormLp, VariableMap)>,
    lp: StandardFormLp,
}

#[pymethods]
impl Problem {
    /// Parses MPS text; `fixed=True` selects the column-positioned dialect.
    #[staticmethod]
    #[pyo3(signature = (text, fixed = false))]
    fn from_mps(text: &str, fixed: bool) -> PyResult<Self> {
        let format = if fixed { MpsFormat::Fixed } else { MpsFormat::Free };
        let general = parse_mps_with(text, format).map_err(value_error)?;
        let (lp, map) = to_standard_form(&general).map_err(value_error)?;
        Ok(Self {
            general: Some((general, map)),
            lp,
        })
    }

    /// Standard-form problem from a dense row-major matrix.
    #[staticmethod]
    fn from_dense(a: Vec<Vec<f64>>, b: Vec<f64>, c: Vec<f64>) -> PyResult<Self> {
        let lp = StandardFormLp::from_dense(&a, b, c).map_err(value_error)?;
        Ok(Self { general: None, lp })
    }

    #[getter]
    fn name(&self) -> String {
        self.general.as_ref().map_or_else(String::new, |(g, _)| g.name.clone())
    }

    /// Rows of the standard form.
    #[getter]
    fn n_rows(&self) -> usize {
        self.lp.n_rows()
    }

    /// Columns of the standard form.
    #[getter]
    fn n_cols(&self) -> usize {
        self.lp.n_cols()
    }

    #[getter]
    fn nnz(&self) -> usize {
        self.lp.a().nnz()
    }

    #[getter]
    fn b(&self) -> Vec<f64> {
        self.lp.b().to_vec()
    }

    #[getter]
    fn c(&self) -> Vec<f64> {
        self.lp.c().to_vec()
    }

    fn __repr__(&self) -> String {
        format!(
            "Problem(name={:?}, rows={}, cols={}, nnz={})",
            self.name(),
            self.lp.n_rows(),
            self.lp.n_cols(),
            self.lp.a().nnz()
        )
    }
}

#[pyclass(module = "halpern_lp", get_all, skip_from_py_object)]
#[derive(Clone)]
struct FarkasCheck {
    residual: f64,
    margin: f64,
    /// `"as_is"` or `"negated"`.
    orientation: String,
    valid: bool,
}

impl From<infeasibility::FarkasCheck> for FarkasCheck {
    fn from(c: infeasibility::FarkasCheck) -> Self {
        Self {
            residual: c.residual,
            margin: c.margin,
            orientation: match c.orientation {
                Orientation::AsIs => "as_is",
                Orientation::Negated => "negated",
            }
            .into(),
            valid: c.valid,
        }
    }
}

#[pymethods]
impl FarkasCheck {
    fn __repr__(&self) -> String {
        format!(
            "FarkasCheck(valid={}, orientation={:?}, residual={:e}, margin={:e})",
            self.valid, self.orientation, self.residual, self.margin
        )
    }
}

/// Outcome of a solve. Vectors are in the standard form, except `x_original`.
#[pyclass(module = "halpern_lp", get_all)]
struct SolveResult {
    /// `optimal`, `primal_infeasible`, `dual_infeasible`,
    /// `primal_dual_infeasible`, `iteration_limit` or `time_limit`.
    status: String,
    x: Vec<f64>,
    y: Vec<f64>,
    x_original: Option<Vec<f64>>,
    primal_objective: f64,
    dual_objective: f64,
    kkt_error: f64,
    iterations: u64,
    epochs: usize,
    spmv_count: u64,
    eta: f64,
    wall_seconds: f64,
    /// `y` with `Aᵀy ≤ 0`, `bᵀy > 0`, set for primal infeasibility.
    dual_ray: Option<Vec<f64>>,
    /// `u ≥ 0` with `Au = 0`, `cᵀu < 0`, set for dual infeasibility.
    primal_ray: Option<Vec<f64>>,
    json: String,
}

#[pymethods]
impl SolveResult {
    fn to_json(&self) -> String {
        self.json.clone()
    }

    fn __repr__(&self) -> String {
        format!(
            "SolveResult(status={:?}, objective={}, iterations={})",
            self.status, self.primal_objective, self.iterations
        )
    }
}

/// Solves `problem`. `restart` is `adaptive`, `fixed:K` or `none`; `scheme`
/// selects Halpern PDHG or one of the vanilla/averaged baselines.
#[pyfunction]
#[pyo3(signature = (
    problem,
    *,
    tol = DEFAULT_TOLERANCE,
    iteration_limit = 1_000_000,
    time_limit = 3600.0,
    restart = "adaptive",
    scheme = "halpern",
    eta = None,
    check_period = DEFAULT_CHECK_PERIOD,
    seed = None,
))]
#[allow(clippy::too_many_arguments)]
fn solve(
    py: Python<'_>,
    problem: &Problem,
    tol: f64,
    iteration_limit: u64,
    time_limit: f64,
    restart: &str,
    scheme: &str,
    eta: Option<f64>,
    check_period: u64,
    seed: Option<u64>,
) -> PyResult<SolveResult> {
    if !(time_limit.is_finite() && time_limit > 0.0) {
        return Err(value_error(format!("time_limit must be positive, got {time_limit}")));
    }
    let mode = parse_scheme(scheme).map_err(value_error)?;
    let defaults = SolverConfig::default();
    let config = SolverConfig {
        restart: parse_restart(restart).map_err(value_error)?,
        tolerance: tol,
        iteration_limit,
        time_limit: Duration::from_secs_f64(time_limit),
        eta,
        infeasibility_check_period: check_period,
        seed: seed.unwrap_or(defaults.seed),
        ..defaults
    };
    config.validate().map_err(value_error)?;
    let lp = &problem.lp;
    let result = py
        .detach(|| match mode {
            None => core_solve(lp, &config),
            Some(m) => solve_baseline(lp, &config, m),
        })
        .map_err(value_error)?;

    let original = problem.general.as_ref().map(|(g, m)| (g, m));
    let echo = ConfigEcho {
        scheme: scheme.into(),
        restart: restart_name(&config.restart),
        tolerance: config.tolerance,
        iteration_limit: config.iteration_limit,
        time_limit_seconds: time_limit,
        eta: result.eta,
        infeasibility_check_period: config.infeasibility_check_period,
        certificate_tolerance: config.certificate_tolerance,
        seed: config.seed,
    };
    let report = SolutionReport::from_result(&problem.name(), &result, lp, original, echo);
    let (dual_ray, primal_ray) = match &result.certificate {
        Some(c) if result.status.is_infeasible() => (c.dual_ray.clone(), c.primal_ray.clone()),
        _ => (None, None),
    };
    Ok(SolveResult {
        status: result.status.as_str().into(),
        x_original: original.map(|(_, m)| m.recover_primal(&result.iterate.x)),
        x: result.iterate.x.clone(),
        y: result.iterate.y.clone(),
        primal_objective: report.primal_objective,
        dual_objective: report.dual_objective,
        kkt_error: result.kkt.max_relative,
        iterations: result.iterations,
        epochs: result.epochs.len(),
        spmv_count: result.spmv_count,
        eta: result.eta,
        wall_seconds: result.wall_time.as_secs_f64(),
        dual_ray,
        primal_ray,
        json: write_solution_json(&report, JsonOptions::default()),
    })
}

/// Checks `±v_y` as a proof that `Ax = b, x ≥ 0` has no solution.
#[pyfunction]
#[pyo3(signature = (problem, v_y, tol = DEFAULT_CERTIFICATE_TOL))]
fn validate_primal_infeasibility(problem: &Problem, v_y: Vec<f64>, tol: f64) -> PyResult<FarkasCheck> {
    let r = infeasibility::validate_primal_infeasibility(&v_y, &problem.lp, tol).map_err(value_error)?;
    Ok(r.primal.expect("primal check present").into())
}

/// Checks `±v_x` as an unbounded primal ray.
#[pyfunction]
#[pyo3(signature = (problem, v_x, tol = DEFAULT_CERTIFICATE_TOL))]
fn validate_dual_infeasibility(problem: &Problem, v_x: Vec<f64>, tol: f64) -> PyResult<FarkasCheck> {
    let r = infeasibility::validate_dual_infeasibility(&v_x, &problem.lp, tol).map_err(value_error)?;
    Ok(r.dual.expect("dual check present").into())
}

#[pyfunction]
#[pyo3(signature = (times, shift = 10.0))]
fn shifted_geometric_mean(times: Vec<f64>, shift: f64) -> f64 {
    sgm(&times, shift)
}

#[pymodule]
fn halpern_lp(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Problem>()?;
    m.add_class::<SolveResult>()?;
    m.add_class::<FarkasCheck>()?;
    m.add_function(wrap_pyfunction!(solve, m)?)?;
    m.add_function(wrap_pyfunction!(validate_primal_infeasibility, m)?)?;
    m.add_function(wrap_pyfunction!(validate_dual_infeasibility, m)?)?;
    m.add_function(wrap_pyfunction!(shifted_geometric_mean, m)?)?;
    Ok(())
}
