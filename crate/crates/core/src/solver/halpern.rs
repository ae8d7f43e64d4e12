use crate::error::Result;
use crate::model::StandardFormLp;
use crate::pdhg::{pdhg_step_with, Iterate, Projection, StepSize};

/// `((k+1)/(k+2))·T(z_k) + (1/(k+2))·z_anchor`.
pub fn halpern_step(
    z_k: &Iterate,
    z_anchor: &Iterate,
    k: u64,
    lp: &StandardFormLp,
    eta: StepSize,
) -> Result<Iterate> {
    halpern_step_with(z_k, z_anchor, k, lp, eta, Projection::NonNegative)
}

pub fn halpern_step_with(
    z_k: &Iterate,
    z_anchor: &Iterate,
    k: u64,
    lp: &StandardFormLp,
    eta: StepSize,
    projection: Projection,
) -> Result<Iterate> {
    let tz = pdhg_step_with(z_k, lp, eta, projection)?;
    let (wt, wa) = halpern_weights(k);
    Ok(Iterate::combine(wt, &tz, wa, z_anchor))
}

pub(crate) fn halpern_weights(k: u64) -> (f64, f64) {
    let k = k as f64;
    ((k + 1.0) / (k + 2.0), 1.0 / (k + 2.0))
}
