use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// The universal constants the hard instances and reductions are stated with.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ProblemConstants {
    /// ANV loss target for conditioned instances.
    pub c1: f64,
    /// Tolerated misclassification fraction.
    pub c2: f64,
    /// Conditioning threshold on `e₁ᵀw*`.
    pub c_f: f64,
    /// Perturbation scale of the hard separator distributions.
    pub c: f64,
}

impl Default for ProblemConstants {
    fn default() -> Self {
        ProblemConstants {
            c1: 0.09,
            c2: 0.05,
            c_f: 0.2,
            c: 0.2,
        }
    }
}

impl ProblemConstants {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("c1", self.c1), ("c2", self.c2), ("c_f", self.c_f), ("c", self.c)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")));
            }
        }
        if self.c_f >= 1.0 {
            return Err(Error::InvalidParameter(format!("c_f must be below 1, got {}", self.c_f)));
        }
        Ok(())
    }

    /// Separator perturbation `c₄ = √c₁`.
    pub fn c4(&self) -> f64 {
        self.c1.sqrt()
    }

    /// LR loss below which the normalized solution is guaranteed to be a `c₁`-ANV.
    pub fn lr_loss_threshold(&self) -> f64 {
        let cf2 = self.c_f * self.c_f;
        (self.c1 * cf2 / 4.0).min(cf2 / 4.0)
    }
}

/// Default cap on rejection-sampling attempts.
pub const DEFAULT_MAX_ATTEMPTS: usize = 10_000;
