use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Outcome of a converged perceptron run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerceptronFit {
    /// Unnormalized weight vector `Σ yᵢxᵢ` over mistakes.
    pub weights: DVector<f64>,
    pub updates: usize,
    pub passes: usize,
}

/// Classic perceptron cycling through the points in order until a full pass makes
/// no mistake (`wᵀxᵢyᵢ ≤ 0` counts as a mistake).
pub fn perceptron_fit(points: &[(DVector<f64>, f64)], max_passes: usize) -> Result<PerceptronFit> {
    let Some((first, _)) = points.first() else {
        return Err(Error::EmptyList);
    };
    let mut w = DVector::zeros(first.len());
    let mut updates = 0;
    for pass in 1..=max_passes {
        let mut clean = true;
        for (x, y) in points {
            if w.dot(x) * y <= 0.0 {
                w.axpy(*y, x, 1.0);
                updates += 1;
                clean = false;
            }
        }
        if clean {
            return Ok(PerceptronFit {
                weights: w,
                updates,
                passes: pass,
            });
        }
    }
    Err(Error::NotSeparableInProjection { passes: max_passes })
}

/// Unit separator of `points`, or an error after `max_passes` passes.
pub fn perceptron(points: &[(DVector<f64>, f64)], max_passes: usize) -> Result<DVector<f64>> {
    let fit = perceptron_fit(points, max_passes)?;
    let n = fit.weights.norm();
    Ok(fit.weights / n)
}
