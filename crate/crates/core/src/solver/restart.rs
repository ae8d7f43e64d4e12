use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_TAU0: u64 = 32;
pub const DEFAULT_MAX_EPOCH: u64 = 1000;

/// When the outer loop re-anchors the Halpern iteration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RestartScheme {
    /// Restart once the inner counter reaches `k_star`.
    FixedFrequency { k_star: u64 },
    /// Epoch 0 restarts after `tau0` inner steps; later epochs restart once the
    /// fixed-point residual has dropped to `beta` times its epoch-start value,
    /// or after `max_epoch` inner steps when set. On infeasible problems the
    /// residual tends to `‖v‖ > 0` and only the cap fires.
    AdaptiveResidualDecay {
        beta: f64,
        tau0: u64,
        #[serde(default)]
        max_epoch: Option<u64>,
    },
    None,
}

impl Default for RestartScheme {
    fn default() -> Self {
        Self::adaptive()
    }
}

impl RestartScheme {
    pub fn adaptive() -> Self {
        RestartScheme::AdaptiveResidualDecay {
            beta: (-1.0f64).exp(),
            tau0: DEFAULT_TAU0,
            max_epoch: Some(DEFAULT_MAX_EPOCH),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            RestartScheme::FixedFrequency { k_star: 0 } => {
                Err(Error::InvalidConfig("k_star must be at least 1".into()))
            }
            RestartScheme::AdaptiveResidualDecay { beta, .. } if !(beta > 0.0 && beta < 1.0) => {
                Err(Error::InvalidConfig(format!("beta must lie in (0, 1), got {beta}")))
            }
            RestartScheme::AdaptiveResidualDecay { tau0: 0, .. } => {
                Err(Error::InvalidConfig("tau0 must be at least 1".into()))
            }
            RestartScheme::AdaptiveResidualDecay {
                max_epoch: Some(0), ..
            } => Err(Error::InvalidConfig("max_epoch must be at least 1".into())),
            _ => Ok(()),
        }
    }
}

/// Restart test for epoch `n` at inner step `k`.
pub fn should_restart(
    scheme: &RestartScheme,
    n: u64,
    k: u64,
    residual_now: f64,
    residual_epoch_start: f64,
) -> bool {
    match *scheme {
        RestartScheme::FixedFrequency { k_star } => k >= k_star,
        RestartScheme::AdaptiveResidualDecay {
            beta,
            tau0,
            max_epoch,
        } => {
            if n == 0 {
                k > tau0
            } else {
                residual_now <= beta * residual_epoch_start || max_epoch.is_some_and(|m| k >= m)
            }
        }
        RestartScheme::None => false,
    }
}
