//! Restarted Halpern PDHG.
//!
//! Inner loop: `z^{n,k+1} = ((k+1)/(k+2))·T(z^{n,k}) + (1/(k+2))·z^{n,0}`.
//! On restart the next epoch starts one PDHG step further,
//! `z^{n+1,0} = T(z^{n,k})`. Every inner step evaluates `T` exactly once; the
//! fixed-point residual, KKT error and certificate candidates are all derived
//! from that evaluation.

mod halpern;
mod restart;

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

pub use halpern::{halpern_step, halpern_step_with};
pub(crate) use halpern::halpern_weights;
pub use restart::{should_restart, RestartScheme, DEFAULT_MAX_EPOCH, DEFAULT_TAU0};

use crate::diagnostics::{partition_from_reduced_costs, TraceRecord, DEFAULT_TOL_ACTIVE};
use crate::error::{Error, Result};
use crate::infeasibility::{
    classify, difference_candidate, extract_candidates, Certificate, CertificateCandidate,
    Feasibility, DEFAULT_CERTIFICATE_TOL,
};
use crate::model::{
    estimate_spectral_norm, StandardFormLp, DEFAULT_POWER_MAX_ITERS, DEFAULT_POWER_SEED,
    DEFAULT_POWER_TOL,
};
use crate::pdhg::{Evaluated, Iterate, KktError, PdhgOperator, StepSize};

pub const DEFAULT_TOLERANCE: f64 = 1e-8;
pub const DEFAULT_CHECK_PERIOD: u64 = 100;

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub restart: RestartScheme,
    /// Relative KKT tolerance for optimality.
    pub tolerance: f64,
    /// Maximum number of operator evaluations. Zero returns the initial point.
    pub iteration_limit: u64,
    pub time_limit: Duration,
    /// Overrides `η = 1/(2‖A‖est)`.
    pub eta: Option<f64>,
    /// Certificate candidates are validated every this many iterations and at
    /// every epoch start. Zero disables infeasibility detection.
    pub infeasibility_check_period: u64,
    pub certificate_tolerance: f64,
    /// A trace record is emitted every this many iterations; zero disables.
    pub trace_period: u64,
    pub tol_active: f64,
    /// Seed of the power-iteration start vector.
    pub seed: u64,
    pub initial: Option<Iterate>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            restart: RestartScheme::adaptive(),
            tolerance: DEFAULT_TOLERANCE,
            iteration_limit: 1_000_000,
            time_limit: Duration::from_secs(3600),
            eta: None,
            infeasibility_check_period: DEFAULT_CHECK_PERIOD,
            certificate_tolerance: DEFAULT_CERTIFICATE_TOL,
            trace_period: 0,
            tol_active: DEFAULT_TOL_ACTIVE,
            seed: DEFAULT_POWER_SEED,
            initial: None,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tolerance.is_finite() && self.tolerance > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "tolerance must be positive, got {}",
                self.tolerance
            )));
        }
        if !(self.certificate_tolerance.is_finite() && self.certificate_tolerance > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "certificate tolerance must be positive, got {}",
                self.certificate_tolerance
            )));
        }
        if !(self.tol_active.is_finite() && self.tol_active >= 0.0) {
            return Err(Error::InvalidConfig("tol_active must be nonnegative".into()));
        }
        if self.time_limit.is_zero() {
            return Err(Error::InvalidConfig("time limit must be positive".into()));
        }
        self.restart.validate()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Optimal,
    PrimalInfeasible,
    DualInfeasible,
    PrimalDualInfeasible,
    IterationLimit,
    TimeLimit,
}

impl Status {
    pub fn is_infeasible(self) -> bool {
        matches!(
            self,
            Status::PrimalInfeasible | Status::DualInfeasible | Status::PrimalDualInfeasible
        )
    }

    pub fn is_limit(self) -> bool {
        matches!(self, Status::IterationLimit | Status::TimeLimit)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Status::Optimal => "optimal",
            Status::PrimalInfeasible => "primal_infeasible",
            Status::DualInfeasible => "dual_infeasible",
            Status::PrimalDualInfeasible => "primal_dual_infeasible",
            Status::IterationLimit => "iteration_limit",
            Status::TimeLimit => "time_limit",
        }
    }
}

/// Statistics of one outer-loop epoch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpochStats {
    pub epoch: u64,
    /// Global iteration at which the epoch started.
    pub start_iteration: u64,
    /// Restart length `τⁿ`; `None` for the epoch that was running at exit.
    pub length: Option<u64>,
    /// `‖z^{n,0} - T(z^{n,0})‖`.
    pub residual_start: f64,
    /// Relative KKT error at `z^{n,0}`.
    pub kkt_start: KktError,
    /// `residual_start` divided by the previous epoch's value.
    pub residual_ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub status: Status,
    /// Final point; for infeasible statuses the last iterate.
    pub iterate: Iterate,
    pub kkt: KktError,
    pub certificate: Option<Certificate>,
    pub epochs: Vec<EpochStats>,
    pub iterations: u64,
    pub spmv_count: u64,
    pub wall_time: Duration,
    pub eta: f64,
    pub norm_estimate: f64,
}

impl SolveResult {
    pub fn primal_objective(&self, lp: &StandardFormLp) -> f64 {
        lp.objective(&self.iterate.x)
    }

    /// `-bᵀy` under the saddle convention `cᵀx + yᵀAx - bᵀy`.
    pub fn dual_objective(&self, lp: &StandardFormLp) -> f64 {
        -lp.b()
            .iter()
            .zip(&self.iterate.y)
            .map(|(b, y)| b * y)
            .sum::<f64>()
    }
}

/// View of one inner step handed to observers.
#[derive(Debug, Clone, Copy)]
pub struct StepEvent<'a> {
    pub epoch: u64,
    pub inner: u64,
    pub iteration: u64,
    /// `z^{n,k}`.
    pub z: &'a Iterate,
    /// `T(z^{n,k})`.
    pub tz: &'a Iterate,
    /// `z^{n,0}`.
    pub anchor: &'a Iterate,
    /// `‖z^{n,k} - T(z^{n,k})‖`.
    pub residual: f64,
    pub kkt: KktError,
}

/// Synchronous hooks invoked from inside the solve loop.
pub trait SolveObserver {
    fn on_step(&mut self, _step: &StepEvent<'_>) {}
    fn on_trace(&mut self, _record: &TraceRecord) {}
}

impl SolveObserver for () {}

/// Collects every trace record.
#[derive(Debug, Default, Clone)]
pub struct TraceCollector {
    pub records: Vec<TraceRecord>,
}

impl SolveObserver for TraceCollector {
    fn on_trace(&mut self, record: &TraceRecord) {
        self.records.push(record.clone());
    }
}

pub fn solve(lp: &StandardFormLp, config: &SolverConfig) -> Result<SolveResult> {
    solve_observed(lp, config, &mut ())
}

pub fn solve_observed<O: SolveObserver>(
    lp: &StandardFormLp,
    config: &SolverConfig,
    observer: &mut O,
) -> Result<SolveResult> {
    let mut run = Run::new(lp, config, observer)?;
    let mut current = run.op.evaluate(run.initial.clone())?;
    if config.iteration_limit == 0 {
        let kkt = run.op.kkt(&current);
        return Ok(run.finish(Status::IterationLimit, current.z, kkt, None));
    }
    let mut anchor = current.clone();
    let mut epoch = 0u64;
    let mut k = 0u64;
    let mut residual_start = 0.0;

    loop {
        if let Some(status) = run.limit_status() {
            let kkt = run.op.kkt(&current);
            return Ok(run.finish(status, current.z, kkt, None));
        }
        let t = run.op.apply(&current);
        let iteration = run.iterations;
        run.iterations += 1;
        let residual = run.op.distance(&current, &t);
        let kkt = run.op.kkt(&t);
        if k == 0 {
            residual_start = residual;
            run.begin_epoch(epoch, iteration, residual, run.op.kkt(&current));
        }

        run.observer.on_step(&StepEvent {
            epoch,
            inner: k,
            iteration,
            z: &current.z,
            tz: &t.z,
            anchor: &anchor.z,
            residual,
            kkt,
        });

        let optimal = kkt.max_relative <= config.tolerance;
        let normalized_norm =
            (k > 0).then(|| run.op.distance(&current, &anchor) * 2.0 / k as f64);
        run.trace(epoch, k, iteration, residual, &kkt, &t, normalized_norm, optimal);
        if optimal {
            return Ok(run.finish(Status::Optimal, t.z, kkt, None));
        }

        if run.check_due(iteration, k == 0) {
            let candidates: Vec<CertificateCandidate> = if k == 0 {
                vec![difference_candidate(&current.z, &t.z, iteration)]
            } else {
                extract_candidates(&current.z, &anchor.z, &t.z, k, iteration)?.to_vec()
            };
            if let Some((status, cert)) = run.detect_infeasibility(&candidates)? {
                return Ok(run.finish(status, t.z, kkt, Some(cert)));
            }
        }

        if k >= 1 && should_restart(&config.restart, epoch, k, residual, residual_start) {
            run.end_epoch(k);
            current = t;
            anchor = current.clone();
            epoch += 1;
            k = 0;
            continue;
        }

        let (wt, wa) = halpern_weights(k);
        current = Evaluated::combine(wt, &t, wa, &anchor);
        k += 1;
    }
}

/// State shared by the Halpern loop and the baseline loops.
pub(crate) struct Run<'a, O: SolveObserver> {
    pub op: PdhgOperator<'a>,
    pub config: &'a SolverConfig,
    pub observer: &'a mut O,
    pub initial: Iterate,
    pub iterations: u64,
    pub epochs: Vec<EpochStats>,
    start: Instant,
    norm_estimate: f64,
}

impl<'a, O: SolveObserver> Run<'a, O> {
    pub fn new(lp: &'a StandardFormLp, config: &'a SolverConfig, observer: &'a mut O) -> Result<Self> {
        config.validate()?;
        let start = Instant::now();
        let sigma = estimate_spectral_norm(lp.a(), DEFAULT_POWER_TOL, DEFAULT_POWER_MAX_ITERS, config.seed);
        let norm_estimate = sigma * (1.0 + DEFAULT_POWER_TOL);
        let eta = match config.eta {
            Some(eta) => StepSize::new(eta, sigma)?,
            None => StepSize::default_for(norm_estimate),
        };
        let initial = match &config.initial {
            Some(z) => {
                if z.x.len() != lp.n_cols() || z.y.len() != lp.n_rows() {
                    return Err(Error::DimensionMismatch {
                        context: "initial iterate",
                        expected: lp.n_cols() + lp.n_rows(),
                        actual: z.x.len() + z.y.len(),
                    });
                }
                if !z.is_finite() {
                    return Err(Error::NonFinite("initial iterate"));
                }
                z.clone()
            }
            None => Iterate::zeros_for(lp),
        };
        Ok(Self {
            op: PdhgOperator::new(lp, eta),
            config,
            observer,
            initial,
            iterations: 0,
            epochs: Vec::new(),
            start,
            norm_estimate,
        })
    }

    pub fn limit_status(&self) -> Option<Status> {
        if self.iterations >= self.config.iteration_limit {
            Some(Status::IterationLimit)
        } else if self.start.elapsed() >= self.config.time_limit {
            Some(Status::TimeLimit)
        } else {
            None
        }
    }

    pub fn begin_epoch(&mut self, epoch: u64, iteration: u64, residual: f64, kkt: KktError) {
        let residual_ratio = self.epochs.last().map(|prev| {
            if prev.residual_start > 0.0 {
                residual / prev.residual_start
            } else {
                f64::INFINITY
            }
        });
        self.epochs.push(EpochStats {
            epoch,
            start_iteration: iteration,
            length: None,
            residual_start: residual,
            kkt_start: kkt,
            residual_ratio,
        });
    }

    pub fn end_epoch(&mut self, length: u64) {
        if let Some(last) = self.epochs.last_mut() {
            last.length = Some(length);
        }
    }

    pub fn check_due(&self, iteration: u64, epoch_start: bool) -> bool {
        let period = self.config.infeasibility_check_period;
        period > 0 && (epoch_start || (iteration + 1).is_multiple_of(period))
    }

    pub fn detect_infeasibility(
        &self,
        candidates: &[CertificateCandidate],
    ) -> Result<Option<(Status, Certificate)>> {
        let c = classify(candidates, self.op.lp(), self.config.certificate_tolerance)?;
        let status = match c.feasibility {
            Feasibility::PrimalInfeasible => Status::PrimalInfeasible,
            Feasibility::DualInfeasible => Status::DualInfeasible,
            Feasibility::PrimalDualInfeasible => Status::PrimalDualInfeasible,
            Feasibility::Feasible | Feasibility::Undetermined => return Ok(None),
        };
        Ok(c.certificate.map(|cert| (status, cert)))
    }

    /// Emits a trace record for the step `z -> t` when one is due.
    #[allow(clippy::too_many_arguments)]
    pub fn trace(
        &mut self,
        epoch: u64,
        inner: u64,
        iteration: u64,
        residual: f64,
        kkt: &KktError,
        t: &Evaluated,
        normalized_candidate_norm: Option<f64>,
        force: bool,
    ) {
        let period = self.config.trace_period;
        if period == 0 || !(force || iteration.is_multiple_of(period)) {
            return;
        }
        let lp = self.op.lp();
        let reduced: Vec<f64> = t.aty.iter().zip(lp.c()).map(|(g, c)| g + c).collect();
        let partition =
            partition_from_reduced_costs(&t.z.x, &reduced, lp.norm_estimate(), self.config.tol_active);
        let record = TraceRecord {
            epoch,
            inner,
            iteration,
            fixed_point_residual: residual,
            kkt: *kkt,
            partition,
            normalized_candidate_norm,
            difference_candidate_norm: residual,
            wall_seconds: self.start.elapsed().as_secs_f64(),
        };
        self.observer.on_trace(&record);
    }

    pub fn finish(
        self,
        status: Status,
        iterate: Iterate,
        kkt: KktError,
        certificate: Option<Certificate>,
    ) -> SolveResult {
        SolveResult {
            status,
            iterate,
            kkt,
            certificate,
            epochs: self.epochs,
            iterations: self.iterations,
            spmv_count: self.op.product_count(),
            wall_time: self.start.elapsed(),
            eta: self.op.step_size().eta(),
            norm_estimate: self.norm_estimate,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e1() -> StandardFormLp {
        StandardFormLp::from_dense(&[vec![1.0]], vec![1.0], vec![0.0]).unwrap()
    }

    #[test]
    fn e1_solves_to_saddle_point() {
        let r = solve(&e1(), &SolverConfig::default()).unwrap();
        assert_eq!(r.status, Status::Optimal);
        assert!((r.iterate.x[0] - 1.0).abs() < 1e-6);
        assert!(r.iterate.y[0].abs() < 1e-6);
        assert!(r.kkt.max_relative <= 1e-8);
    }

    #[test]
    fn zero_budget_returns_initial_point() {
        let cfg = SolverConfig {
            iteration_limit: 0,
            initial: Some(Iterate::new(vec![0.25], vec![-1.0])),
            ..SolverConfig::default()
        };
        let r = solve(&e1(), &cfg).unwrap();
        assert_eq!(r.status, Status::IterationLimit);
        assert_eq!(r.iterate, Iterate::new(vec![0.25], vec![-1.0]));
        assert_eq!(r.iterations, 0);
    }

    #[test]
    fn primal_infeasible_instance_is_detected() {
        let lp = StandardFormLp::from_dense(&[vec![1.0], vec![1.0]], vec![1.0, 2.0], vec![0.0])
            .unwrap();
        let r = solve(&lp, &SolverConfig::default()).unwrap();
        assert_eq!(r.status, Status::PrimalInfeasible);
        let cert = r.certificate.unwrap();
        assert!(cert.report.primal_valid());
        let y = cert.dual_ray.unwrap();
        assert!(y[1] > 0.0 && y[0] < 0.0);
    }

    #[test]
    fn invalid_configs_rejected() {
        let lp = e1();
        let bad = SolverConfig {
            tolerance: 0.0,
            ..SolverConfig::default()
        };
        assert!(matches!(solve(&lp, &bad), Err(Error::InvalidConfig(_))));
        let bad = SolverConfig {
            eta: Some(10.0),
            ..SolverConfig::default()
        };
        assert!(matches!(solve(&lp, &bad), Err(Error::InvalidStepSize { .. })));
    }

    #[test]
    fn time_limit_reports_limit_status() {
        // large tolerance would stop immediately; use an unreachable one
        let lp = StandardFormLp::from_dense(&[vec![1.0], vec![1.0]], vec![1.0, 2.0], vec![0.0])
            .unwrap();
        let cfg = SolverConfig {
            time_limit: Duration::from_nanos(1),
            infeasibility_check_period: 0,
            ..SolverConfig::default()
        };
        let r = solve(&lp, &cfg).unwrap();
        assert_eq!(r.status, Status::TimeLimit);
    }
}
