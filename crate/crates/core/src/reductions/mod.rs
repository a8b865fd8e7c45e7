//! Wrappers turning a separator or a regression solver into an ANV solver.
//!
//! Neither wrapper keeps state of its own: the inner algorithm's memory
//! configuration is passed through untouched, so the wrapped algorithm runs
//! under exactly the inner budget.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::config::ProblemConstants;
use crate::instances::{insertion_position, shifted_pair, Equation, LabeledPoint};
use crate::linalg::unit_vector;
use crate::streaming::{BitState, OnePassAlgorithm, SharedRandomness};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReductionConfig {
    /// Separator shift `c₄ = √c₁`.
    pub c4: f64,
    /// Target of the inserted equation `e₁ᵀw = c_f`.
    pub c_f: f64,
    /// Smallest inner output norm accepted before normalizing.
    pub norm_floor: f64,
}

impl ReductionConfig {
    pub fn new(c4: f64, c_f: f64, norm_floor: f64) -> Result<Self> {
        for (name, v) in [("c4", c4), ("c_f", c_f), ("norm_floor", norm_floor)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(ReductionConfig { c4, c_f, norm_floor })
    }
}

impl From<&ProblemConstants> for ReductionConfig {
    fn from(k: &ProblemConstants) -> Self {
        ReductionConfig {
            c4: k.c4(),
            c_f: k.c_f,
            norm_floor: k.c_f / 2.0,
        }
    }
}

impl Default for ReductionConfig {
    fn default() -> Self {
        (&ProblemConstants::default()).into()
    }
}

fn normalized(w: DVector<f64>, floor: f64) -> Result<DVector<f64>> {
    let norm = w.norm();
    if !(norm >= floor) || norm == 0.0 {
        return Err(Error::DegenerateOutput { norm, floor });
    }
    Ok(w / norm)
}

/// ANV solver from a separator: `θᵢ` becomes `(θᵢ + c₄e₁/√d, +1)` at inner step
/// `2i` and `(θᵢ − c₄e₁/√d, −1)` at `2i + 1`.
#[derive(Debug, Clone)]
pub struct AnvViaLsp<A> {
    inner: A,
    cfg: ReductionConfig,
}

pub fn anv_via_lsp<A>(inner: A, cfg: ReductionConfig) -> AnvViaLsp<A>
where
    A: OnePassAlgorithm<Sample = LabeledPoint, Output = DVector<f64>>,
{
    AnvViaLsp { inner, cfg }
}

impl<A> AnvViaLsp<A> {
    pub fn inner(&self) -> &A {
        &self.inner
    }
}

impl<A> OnePassAlgorithm for AnvViaLsp<A>
where
    A: OnePassAlgorithm<Sample = LabeledPoint, Output = DVector<f64>>,
{
    type Sample = DVector<f64>;
    type Output = DVector<f64>;

    fn update(&self, step: usize, theta: &DVector<f64>, state: BitState, rand: &SharedRandomness) -> Result<BitState> {
        let [plus, minus] = shifted_pair(theta, self.cfg.c4);
        let state = self.inner.update(2 * step, &plus, state, rand)?;
        self.inner.update(2 * step + 1, &minus, state, rand)
    }

    fn finalize(&self, state: &BitState, rand: &SharedRandomness) -> Result<DVector<f64>> {
        // Any nonzero separator normalizes; only an all-zero output is degenerate.
        normalized(self.inner.finalize(state, rand)?, f64::MIN_POSITIVE)
    }
}

const INSERT_LABEL: u64 = 0x4c52_494e_5345_5254;

/// ANV solver from a regression solver: the equation `e₁ᵀw = c_f` is fed after
/// the first `i` vectors, `i` uniform in `{0, …, d − 1}` from the shared tape.
///
/// Expects exactly `d − 1` samples; when `i = d − 1` the extra equation is fed
/// just before finalizing.
#[derive(Debug, Clone)]
pub struct AnvViaLr<A> {
    inner: A,
    cfg: ReductionConfig,
    d: usize,
}

pub fn anv_via_lr<A>(inner: A, d: usize, cfg: ReductionConfig) -> AnvViaLr<A>
where
    A: OnePassAlgorithm<Sample = Equation, Output = DVector<f64>>,
{
    AnvViaLr { inner, cfg, d }
}

impl<A> AnvViaLr<A> {
    /// Number of ANV vectors preceding the inserted equation under `rand`.
    pub fn insertion_position(&self, rand: &SharedRandomness) -> usize {
        insertion_position(self.d, rand.derive(INSERT_LABEL).uniform(0))
    }

    pub fn inner(&self) -> &A {
        &self.inner
    }

    fn anchor(&self) -> Equation {
        Equation {
            row: unit_vector(self.d, 0),
            target: self.cfg.c_f,
        }
    }
}

impl<A> OnePassAlgorithm for AnvViaLr<A>
where
    A: OnePassAlgorithm<Sample = Equation, Output = DVector<f64>>,
{
    type Sample = DVector<f64>;
    type Output = DVector<f64>;

    fn update(&self, step: usize, theta: &DVector<f64>, state: BitState, rand: &SharedRandomness) -> Result<BitState> {
        let pos = self.insertion_position(rand);
        let eq = Equation {
            row: theta.clone(),
            target: 0.0,
        };
        if step < pos {
            self.inner.update(step, &eq, state, rand)
        } else if step == pos {
            let state = self.inner.update(step, &self.anchor(), state, rand)?;
            self.inner.update(step + 1, &eq, state, rand)
        } else {
            self.inner.update(step + 1, &eq, state, rand)
        }
    }

    fn finalize(&self, state: &BitState, rand: &SharedRandomness) -> Result<DVector<f64>> {
        let w = if self.insertion_position(rand) + 1 == self.d {
            let last = self.inner.update(self.d - 1, &self.anchor(), state.clone(), rand)?;
            self.inner.finalize(&last, rand)?
        } else {
            self.inner.finalize(state, rand)?
        };
        normalized(w, self.cfg.norm_floor)
    }
}
