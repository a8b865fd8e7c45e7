//! Exact law of one coordinate of a uniform point on `S^{d−1}`.
//!
//! The coordinate `t` has density proportional to `(1 − t²)^{(d−3)/2}` on
//! `[−1, 1]`. Substituting `t = cos φ` turns this into `sin^{d−2} φ` on
//! `[0, π]`, which is smooth for every `d ≥ 2` and is integrated with adaptive
//! Simpson quadrature.

use std::f64::consts::PI;

use crate::{Error, Result};

const QUAD_TOL: f64 = 1e-13;
const MAX_DEPTH: u32 = 50;

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn adapt(
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if depth >= MAX_DEPTH || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    adapt(f, a, m, fa, flm, fm, left, tol / 2.0, depth + 1) + adapt(f, m, b, fm, frm, fb, right, tol / 2.0, depth + 1)
}

/// `∫_a^b f` to relative accuracy about `rel_tol`.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, rel_tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    // Split into pieces first so narrow peaks are not missed by the first estimate.
    let pieces = 16;
    let h = (b - a) / pieces as f64;
    let coarse: Vec<(f64, f64, f64, f64, f64)> = (0..pieces)
        .map(|k| {
            let lo = a + k as f64 * h;
            let hi = if k + 1 == pieces { b } else { lo + h };
            let (flo, fmid, fhi) = (f(lo), f(0.5 * (lo + hi)), f(hi));
            (lo, hi, flo, fmid, fhi)
        })
        .collect();
    let total: f64 = coarse.iter().map(|&(lo, hi, x, y, z)| simpson(lo, hi, x, y, z)).sum();
    let tol = rel_tol * total.abs().max(f64::MIN_POSITIVE) / pieces as f64;
    coarse
        .into_iter()
        .map(|(lo, hi, x, y, z)| adapt(&f, lo, hi, x, y, z, simpson(lo, hi, x, y, z), tol, 0))
        .sum()
}

fn check_dim(d: usize) -> Result<()> {
    if d < 2 {
        return Err(Error::InvalidParameter(format!("coordinate law needs d ≥ 2, got {d}")));
    }
    Ok(())
}

fn angular_density(d: usize) -> impl Fn(f64) -> f64 {
    let p = (d - 2) as f64;
    move |phi: f64| {
        let s = phi.sin();
        if s <= 0.0 {
            if p == 0.0 {
                1.0
            } else {
                0.0
            }
        } else {
            (p * s.ln()).exp()
        }
    }
}

/// The law of `θ₁` for `θ` uniform on `S^{d−1}`, with its normalizer precomputed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphereCoordinateLaw {
    d: usize,
    total: f64,
}

impl SphereCoordinateLaw {
    pub fn new(d: usize) -> Result<Self> {
        check_dim(d)?;
        Ok(SphereCoordinateLaw {
            d,
            total: integrate(angular_density(d), 0.0, PI, QUAD_TOL),
        })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    /// `Pr(θ₁ ≥ c)`.
    pub fn tail(&self, c: f64) -> f64 {
        if c <= -1.0 {
            return 1.0;
        }
        if c >= 1.0 {
            return 0.0;
        }
        let f = angular_density(self.d);
        let edge = c.acos();
        let p = if c >= 0.0 {
            integrate(&f, 0.0, edge, QUAD_TOL) / self.total
        } else {
            1.0 - integrate(&f, edge, PI, QUAD_TOL) / self.total
        };
        p.clamp(0.0, 1.0)
    }

    /// `Pr(θ₁ ≤ t)`.
    pub fn cdf(&self, t: f64) -> f64 {
        self.tail(-t)
    }

    /// `Pr(θ₁ ≤ tᵢ)` for nondecreasing `tᵢ`, integrating only between neighbours.
    pub fn cdf_sorted(&self, ts: &[f64]) -> Vec<f64> {
        let f = angular_density(self.d);
        let mut acc = 0.0;
        let mut prev = PI;
        ts.iter()
            .map(|&t| {
                let edge = t.clamp(-1.0, 1.0).acos();
                if edge < prev {
                    acc += integrate(&f, edge, prev, QUAD_TOL);
                    prev = edge;
                }
                (acc / self.total).clamp(0.0, 1.0)
            })
            .collect()
    }
}

/// `Pr(θ₁ ≥ c)` for `θ` uniform on `S^{d−1}`.
pub fn sphere_coordinate_tail(d: usize, c: f64) -> Result<f64> {
    Ok(SphereCoordinateLaw::new(d)?.tail(c))
}

/// `Pr(θ₁ ≤ t)`.
pub fn sphere_coordinate_cdf(d: usize, t: f64) -> Result<f64> {
    Ok(SphereCoordinateLaw::new(d)?.cdf(t))
}

/// Probability that a uniform unit vector has `|e₁ᵀw| ≥ c_f`.
///
/// The kernel of i.i.d. rotation-invariant vectors is itself uniform, so this
/// is the exact acceptance probability of the conditioned generators.
pub fn conditioning_acceptance(d: usize, c_f: f64) -> Result<f64> {
    Ok((2.0 * sphere_coordinate_tail(d, c_f.abs())?).min(1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use statrs::function::beta::beta_reg;

    #[test]
    fn sorted_cdf_matches_pointwise() {
        let law = SphereCoordinateLaw::new(20).unwrap();
        let ts = [-1.5, -0.4, -0.1, -0.1, 0.0, 0.25, 0.6, 2.0];
        for (t, c) in ts.iter().zip(law.cdf_sorted(&ts)) {
            assert!((law.cdf(*t) - c).abs() < 1e-12, "{t}");
        }
    }

    #[test]
    fn integrates_polynomials_exactly() {
        let v = integrate(|x| x * x * x, 0.0, 2.0, 1e-14);
        assert!((v - 4.0).abs() < 1e-13);
    }

    #[test]
    fn low_dimensional_laws_are_closed_form() {
        // d = 3: uniform on [−1, 1] (Archimedes).
        for c in [-0.7, 0.0, 0.3, 0.9] {
            assert!((sphere_coordinate_tail(3, c).unwrap() - (1.0 - c) / 2.0).abs() < 1e-12);
        }
        // d = 2: arcsine law.
        for c in [-0.5f64, 0.2, 0.8] {
            let exact = c.acos() / PI;
            assert!((sphere_coordinate_tail(2, c).unwrap() - exact).abs() < 1e-12);
        }
    }

    #[test]
    fn matches_incomplete_beta() {
        // Pr(θ₁ ≥ c) = I_{1−c²}((d−1)/2, 1/2) / 2 for c ≥ 0.
        for d in [4usize, 16, 64, 256, 1024] {
            for c in [0.05, 0.2, 0.5] {
                let oracle = 0.5 * beta_reg((d as f64 - 1.0) / 2.0, 0.5, 1.0 - c * c);
                let ours = sphere_coordinate_tail(d, c).unwrap();
                assert!((ours - oracle).abs() <= 1e-9 * oracle.max(1e-300), "d={d} c={c}: {ours} vs {oracle}");
            }
        }
    }

    #[test]
    fn cdf_is_symmetric() {
        for t in [0.0, 0.1, 0.33] {
            let lo = sphere_coordinate_cdf(64, -t).unwrap();
            let hi = sphere_coordinate_cdf(64, t).unwrap();
            assert!((lo + hi - 1.0).abs() < 1e-12);
        }
        assert!((sphere_coordinate_cdf(64, 0.0).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn tail_decays_in_dimension() {
        let tails: Vec<f64> = [16, 32, 64, 128, 256, 512]
            .iter()
            .map(|&d| sphere_coordinate_tail(d, 0.2).unwrap().ln())
            .collect();
        assert!(tails.windows(2).all(|w| w[1] < w[0]));
        assert!(conditioning_acceptance(1024, 0.2).unwrap() < 1e-9);
    }
}
