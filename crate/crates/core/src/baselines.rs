//! Vanilla and averaged PDHG reference solvers.
//!
//! On an unconstrained bilinear problem Halpern PDHG started at `z⁰` and the
//! running average of vanilla PDHG iterates coincide; [`equivalence_check`]
//! runs both side by side.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::StandardFormLp;
use crate::pdhg::{Evaluated, Iterate, PdhgOperator, Projection, StepSize};
use crate::solver::{
    halpern_weights, should_restart, SolveObserver, SolveResult, SolverConfig, Status, StepEvent,
};
use crate::solver::Run;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunningAverage {
    pub mean: Iterate,
    pub count: u64,
}

impl RunningAverage {
    pub fn new(n: usize, m: usize) -> Self {
        Self {
            mean: Iterate::zeros(n, m),
            count: 0,
        }
    }
}

/// `z̄ + (z - z̄)/(count + 1)`.
pub fn update_average(avg: RunningAverage, z: &Iterate) -> Result<RunningAverage> {
    if z.x.len() != avg.mean.x.len() || z.y.len() != avg.mean.y.len() {
        return Err(Error::DimensionMismatch {
            context: "running average",
            expected: avg.mean.x.len() + avg.mean.y.len(),
            actual: z.x.len() + z.y.len(),
        });
    }
    let w = 1.0 / (avg.count + 1) as f64;
    let step = |m: &mut Vec<f64>, v: &[f64]| {
        for (m, v) in m.iter_mut().zip(v) {
            *m += (v - *m) * w;
        }
    };
    let RunningAverage { mut mean, count } = avg;
    step(&mut mean.x, &z.x);
    step(&mut mean.y, &z.y);
    Ok(RunningAverage {
        mean,
        count: count + 1,
    })
}

/// Runs Halpern PDHG and averaged vanilla PDHG from `z0` with the projection
/// disabled and returns `max_{k <= k_max} ‖z^k - z̄^k‖∞`.
pub fn equivalence_check(lp: &StandardFormLp, z0: &Iterate, k_max: u64, eta: StepSize) -> Result<f64> {
    let op = PdhgOperator::with_projection(lp, eta, Projection::None);
    let anchor = op.evaluate(z0.clone())?;
    let mut halpern = anchor.clone();
    let mut vanilla = anchor.clone();
    let mut avg = update_average(RunningAverage::new(lp.n_cols(), lp.n_rows()), z0)?;
    let mut worst = 0.0f64;
    for k in 0..k_max {
        let (wt, wa) = halpern_weights(k);
        halpern = Evaluated::combine(wt, &op.apply(&halpern), wa, &anchor);
        vanilla = op.apply(&vanilla);
        avg = update_average(avg, &vanilla.z)?;
        worst = worst.max(halpern.z.max_abs_diff(&avg.mean));
    }
    Ok(worst)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BaselineMode {
    /// `z^{k+1} = T(z^k)`; output is the last iterate.
    Vanilla,
    /// Output is the running average of the vanilla iterates.
    Averaged,
    /// Running average, restarted at the average according to the configured
    /// restart scheme applied to the residual of the average.
    RestartedAverage,
}

/// Average of evaluated iterates; products average along with the points.
struct EvaluatedAverage {
    mean: Evaluated,
    count: u64,
}

impl EvaluatedAverage {
    fn start(e: &Evaluated) -> Self {
        Self {
            mean: e.clone(),
            count: 1,
        }
    }

    fn push(&mut self, e: &Evaluated) {
        let w = 1.0 / (self.count + 1) as f64;
        self.mean = Evaluated::combine(1.0 - w, &self.mean, w, e);
        self.count += 1;
    }
}

pub fn solve_baseline(lp: &StandardFormLp, config: &SolverConfig, mode: BaselineMode) -> Result<SolveResult> {
    solve_baseline_observed(lp, config, mode, &mut ())
}

/// Same termination, limits and infeasibility checks as the Halpern solver;
/// the difference candidate `T(z) - z` of the vanilla sequence is used for
/// certificates.
pub fn solve_baseline_observed<O: SolveObserver>(
    lp: &StandardFormLp,
    config: &SolverConfig,
    mode: BaselineMode,
    observer: &mut O,
) -> Result<SolveResult> {
    let mut run = Run::new(lp, config, observer)?;
    let mut current = run.op.evaluate(run.initial.clone())?;
    if config.iteration_limit == 0 {
        let kkt = run.op.kkt(&current);
        return Ok(run.finish(Status::IterationLimit, current.z, kkt, None));
    }
    let mut avg = EvaluatedAverage::start(&current);
    let mut anchor = current.clone();
    let mut epoch = 0u64;
    let mut k = 0u64;
    let mut residual_start = 0.0;

    loop {
        if let Some(status) = run.limit_status() {
            let out = match mode {
                BaselineMode::Vanilla => current,
                _ => avg.mean,
            };
            let kkt = run.op.kkt(&out);
            return Ok(run.finish(status, out.z, kkt, None));
        }
        let t = run.op.apply(&current);
        let iteration = run.iterations;
        run.iterations += 1;
        let residual = run.op.distance(&current, &t);
        if k == 0 {
            residual_start = residual;
            run.begin_epoch(epoch, iteration, residual, run.op.kkt(&current));
        }
        avg.push(&t);

        let (out, out_residual) = match mode {
            BaselineMode::Vanilla => (&t, residual),
            BaselineMode::Averaged => (&avg.mean, residual),
            BaselineMode::RestartedAverage => {
                let ta = run.op.apply(&avg.mean);
                let r = run.op.distance(&avg.mean, &ta);
                (&avg.mean, r)
            }
        };
        let kkt = run.op.kkt(out);
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
        let out = out.clone();
        run.trace(epoch, k, iteration, residual, &kkt, &out, None, optimal);
        if optimal {
            return Ok(run.finish(Status::Optimal, out.z, kkt, None));
        }

        if run.check_due(iteration, k == 0) {
            let cand = crate::infeasibility::difference_candidate(&current.z, &t.z, iteration);
            if let Some((status, cert)) = run.detect_infeasibility(&[cand])? {
                return Ok(run.finish(status, t.z, kkt, Some(cert)));
            }
        }

        if mode == BaselineMode::RestartedAverage
            && k >= 1
            && should_restart(&config.restart, epoch, k, out_residual, residual_start)
        {
            run.end_epoch(k);
            current = out;
            anchor = current.clone();
            avg = EvaluatedAverage::start(&current);
            epoch += 1;
            k = 0;
            continue;
        }
        current = t;
        k += 1;
    }
}
