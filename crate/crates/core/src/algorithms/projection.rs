use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::perceptron::perceptron_fit;
use crate::instances::LabeledPoint;
use crate::linalg::{sample_grassmannian, Subspace};
use crate::streaming::{BitState, OnePassAlgorithm, SharedRandomness};
use crate::{Error, Result};

/// How projected coordinates are stored.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum Quantization {
    /// Clip to `[−range, range]` and round to one of `2^bits` evenly spaced levels.
    Fixed { bits: u32, range: f64 },
    /// Raw 64-bit floats.
    Raw,
}

impl Quantization {
    pub fn bits(&self) -> usize {
        match self {
            Quantization::Fixed { bits, .. } => *bits as usize,
            Quantization::Raw => 64,
        }
    }

    fn validate(&self) -> Result<()> {
        if let Quantization::Fixed { bits, range } = *self {
            if !(1..=63).contains(&bits) || !(range.is_finite() && range > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "fixed quantization needs 1 ≤ bits ≤ 63 and a positive range, got {bits} bits, range {range}"
                )));
            }
        }
        Ok(())
    }

    fn encode(&self, v: f64) -> u64 {
        match *self {
            Quantization::Fixed { bits, range } => {
                let levels = ((1u64 << bits) - 1) as f64;
                let t = (v.clamp(-range, range) + range) / (2.0 * range);
                (t * levels).round() as u64
            }
            Quantization::Raw => v.to_bits(),
        }
    }

    fn decode(&self, q: u64) -> f64 {
        match *self {
            Quantization::Fixed { bits, range } => {
                let levels = ((1u64 << bits) - 1) as f64;
                q as f64 / levels * 2.0 * range - range
            }
            Quantization::Raw => f64::from_bits(q),
        }
    }
}

/// Parameters of the random-projection separator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProjectionConfig {
    pub dprime: usize,
    pub subsample: usize,
    pub quantization: Quantization,
    pub max_passes: usize,
}

impl Default for ProjectionConfig {
    /// Calibrated on the margin-0.3 family at `d = 1024`, `m = 1000`.
    fn default() -> Self {
        ProjectionConfig {
            dprime: 600,
            subsample: 600,
            quantization: Quantization::Fixed { bits: 16, range: 4.0 },
            max_passes: 1000,
        }
    }
}

const COUNT_BITS: usize = 64;
const RESERVOIR_LABEL: u64 = 0x5245_5345_5256;

/// One-pass separator: keeps a uniform reservoir of `subsample` points, each
/// stored as its label and the quantized projection `√(d/d′)·Px`, then runs the
/// perceptron on the reservoir and outputs the preimage `Pᵀw_p` normalized.
///
/// The projection `P` (orthonormal rows spanning a uniform `d′`-subspace) is
/// fixed by the algorithm's seed and is never written to the state.
///
/// Layout: a 64-bit count of points seen, then `subsample` slots of
/// `1 + d′·bits` bits (label bit set for `+1`).
#[derive(Debug, Clone)]
pub struct ProjectionSeparator {
    d: usize,
    cfg: ProjectionConfig,
    proj: Arc<DMatrix<f64>>,
    scale: f64,
}

/// What the separator found, before normalization.
#[derive(Debug, Clone, PartialEq)]
pub struct SeparatorFit {
    /// Separator in the scaled projected space.
    pub w_p: DVector<f64>,
    /// `Pᵀw_p`, the preimage orthogonal to the kernel of `P`.
    pub preimage: DVector<f64>,
    /// Stored points as decoded from the state, in slot order.
    pub stored: Vec<(DVector<f64>, f64)>,
    pub updates: usize,
    pub passes: usize,
}

impl ProjectionSeparator {
    pub fn new(d: usize, cfg: ProjectionConfig, seed: u64) -> Result<Self> {
        if cfg.dprime == 0 || cfg.dprime > d {
            return Err(Error::InvalidParameter(format!("need 1 ≤ d′ ≤ d, got d′ = {}, d = {d}", cfg.dprime)));
        }
        let proj = sample_grassmannian(cfg.dprime, d, &mut ChaCha8Rng::seed_from_u64(seed))?;
        Self::with_projection(&proj, cfg)
    }

    /// Uses the given subspace's basis as `P`.
    pub fn with_projection(proj: &Subspace, cfg: ProjectionConfig) -> Result<Self> {
        cfg.quantization.validate()?;
        if cfg.subsample == 0 {
            return Err(Error::InvalidParameter("subsample size must be positive".into()));
        }
        if proj.dim() != cfg.dprime || proj.dim() == 0 {
            return Err(Error::DimensionMismatch {
                expected: cfg.dprime,
                found: proj.dim(),
            });
        }
        let d = proj.ambient_dim();
        Ok(ProjectionSeparator {
            d,
            cfg,
            proj: Arc::new(proj.basis().clone()),
            scale: (d as f64 / cfg.dprime as f64).sqrt(),
        })
    }

    /// Full-storage offline separator: identity projection, raw floats, room for `capacity` points.
    pub fn lossless(d: usize, capacity: usize, max_passes: usize) -> Result<Self> {
        Self::with_projection(
            &Subspace::full(d),
            ProjectionConfig {
                dprime: d,
                subsample: capacity,
                quantization: Quantization::Raw,
                max_passes,
            },
        )
    }

    pub fn config(&self) -> &ProjectionConfig {
        &self.cfg
    }

    pub fn projection(&self) -> &DMatrix<f64> {
        &self.proj
    }

    /// Scale `√(d/d′)` applied to projected coordinates.
    pub fn scale(&self) -> f64 {
        self.scale
    }

    fn slot_bits(&self) -> usize {
        1 + self.cfg.dprime * self.cfg.quantization.bits()
    }

    /// Exact state size: `64 + subsample·(1 + d′·bits)`.
    pub fn declared_bits(&self) -> usize {
        COUNT_BITS + self.cfg.subsample * self.slot_bits()
    }

    fn write_slot(&self, state: &mut BitState, slot: usize, p: &LabeledPoint) -> Result<()> {
        let q = self.cfg.quantization;
        let width = q.bits();
        let y = (&*self.proj * &p.x) * self.scale;
        let mut w = state.writer_at(COUNT_BITS + slot * self.slot_bits());
        w.write_bool(p.y > 0)?;
        for v in y.iter() {
            w.write_bits(width, q.encode(*v))?;
        }
        Ok(())
    }

    /// Runs the perceptron on the stored sample and returns all intermediate quantities.
    pub fn finalize_detailed(&self, state: &BitState) -> Result<SeparatorFit> {
        let q = self.cfg.quantization;
        let width = q.bits();
        let seen = state.read_bits(0, COUNT_BITS)? as usize;
        let kept = seen.min(self.cfg.subsample);
        let mut stored = Vec::with_capacity(kept);
        let mut r = state.reader_at(COUNT_BITS);
        for _ in 0..kept {
            let y = if r.read_bool()? { 1.0 } else { -1.0 };
            let mut x = DVector::zeros(self.cfg.dprime);
            for v in x.iter_mut() {
                *v = q.decode(r.read_bits(width)?);
            }
            stored.push((x, y));
        }
        let fit = perceptron_fit(&stored, self.cfg.max_passes)?;
        let preimage = self.proj.tr_mul(&fit.weights);
        Ok(SeparatorFit {
            w_p: fit.weights,
            preimage,
            stored,
            updates: fit.updates,
            passes: fit.passes,
        })
    }
}

impl OnePassAlgorithm for ProjectionSeparator {
    type Sample = LabeledPoint;
    type Output = DVector<f64>;

    fn update(&self, _: usize, p: &LabeledPoint, mut state: BitState, rand: &SharedRandomness) -> Result<BitState> {
        if p.x.len() != self.d {
            return Err(Error::DimensionMismatch {
                expected: self.d,
                found: p.x.len(),
            });
        }
        let n = state.read_bits(0, COUNT_BITS)?;
        let s = self.cfg.subsample as u64;
        let slot = if n < s {
            Some(n)
        } else {
            // Algorithm R: keep the new point with probability s/(n+1).
            let j = (rand.derive(RESERVOIR_LABEL).uniform(n) * (n + 1) as f64) as u64;
            (j < s).then_some(j)
        };
        if let Some(slot) = slot {
            self.write_slot(&mut state, slot as usize, p)?;
        }
        state.write_bits(0, COUNT_BITS, n + 1)?;
        Ok(state)
    }

    fn finalize(&self, state: &BitState, _: &SharedRandomness) -> Result<DVector<f64>> {
        let fit = self.finalize_detailed(state)?;
        let n = fit.preimage.norm();
        if n == 0.0 {
            return Err(Error::DegenerateOutput { norm: 0.0, floor: 0.0 });
        }
        Ok(fit.preimage / n)
    }
}
