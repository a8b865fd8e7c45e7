use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ContinuousCDF, Normal};

use super::report::{record, status, LemmaReport};
use crate::linalg::{sample_grassmannian, sample_uniform_sphere};
use crate::marginal::SphereCoordinateLaw;
use crate::streaming::derive_seed;
use crate::{Error, Result};

/// Kolmogorov–Smirnov distance between a sorted sample and a CDF.
pub fn ks_distance(sorted: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let values: Vec<f64> = sorted.iter().map(|&x| cdf(x)).collect();
    ks_from_cdf_values(&values)
}

/// KS distance given the CDF evaluated at each point of a sorted sample.
pub fn ks_from_cdf_values(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    values
        .iter()
        .enumerate()
        .map(|(i, &f)| (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs()))
        .fold(0.0, f64::max)
}

/// Thresholds for [`sphere_marginal_tests`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarginalThresholds {
    pub ks_exact: f64,
    pub ks_normal: f64,
}

impl Default for MarginalThresholds {
    fn default() -> Self {
        MarginalThresholds {
            ks_exact: 0.01,
            ks_normal: 0.03,
        }
    }
}

/// Compares `θ₁` of uniform `θ ∈ S^{d−1}` with its exact law and `√d·θ₁` with
/// `N(0, 1)`, and the empirical `Pr(θ₁ ≥ c_f)` with the exact tail.
///
/// Records are the individual checks: `ks-exact`, `ks-normal` and `tail`
/// (the tail check passes when the empirical rate is within four binomial
/// standard deviations of the exact value).
pub fn sphere_marginal_tests(
    d: usize,
    samples: usize,
    c_f: f64,
    seed: u64,
    thresholds: MarginalThresholds,
) -> Result<LemmaReport> {
    if d < 4 {
        return Err(Error::InvalidParameter(format!("need d ≥ 4, got {d}")));
    }
    if samples == 0 {
        return Err(Error::InvalidParameter("need at least one sample".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut t: Vec<f64> = (0..samples)
        .map(|_| sample_uniform_sphere(d, &mut rng).map(|v| v[0]))
        .collect::<Result<_>>()?;
    t.sort_by(f64::total_cmp);
    let law = SphereCoordinateLaw::new(d)?;
    let ks_exact = ks_from_cdf_values(&law.cdf_sorted(&t));
    let normal = Normal::standard();
    let sd = (d as f64).sqrt();
    let ks_normal = ks_distance(&t, |x| normal.cdf(x * sd));
    let exact_tail = law.tail(c_f);
    let empirical_tail = t.iter().filter(|&&x| x >= c_f).count() as f64 / samples as f64;
    let tail_sigma = (exact_tail * (1.0 - exact_tail) / samples as f64).sqrt();
    let alpha = -exact_tail.ln() / d as f64;
    let records = vec![
        record(0, seed, status(ks_exact <= thresholds.ks_exact), &[("ks", ks_exact)]),
        record(1, seed, status(ks_normal <= thresholds.ks_normal), &[("ks", ks_normal)]),
        record(
            2,
            seed,
            status((empirical_tail - exact_tail).abs() <= 4.0 * tail_sigma),
            &[("empirical", empirical_tail), ("exact", exact_tail)],
        ),
    ];
    let mut r = LemmaReport::new(
        "sphere-marginal",
        d,
        seed,
        &[
            ("samples", samples as f64),
            ("c_f", c_f),
            ("ks_exact_threshold", thresholds.ks_exact),
            ("ks_normal_threshold", thresholds.ks_normal),
        ],
        records,
    );
    r.stat("ks_exact", ks_exact);
    r.stat("ks_normal", ks_normal);
    r.stat("empirical_tail", empirical_tail);
    r.stat("exact_tail", exact_tail);
    r.stat("cap_alpha", alpha);
    r.stat("normal_tail", 1.0 - normal.cdf(c_f * sd));
    let ok = r.pass_fraction == 1.0;
    r.decide(ok, "KS to the exact law and to N(0,1) within thresholds; tail within 4σ");
    Ok(r)
}

/// Concentration of the 1-Lipschitz `f(y) = ‖Proj_{U₂} y‖` for uniform `y` and a
/// fixed `U₂ ∈ Gr(d/2, d)`: passes when `std(f) ≤ c_std/√d`.
pub fn sphere_concentration_test(d: usize, samples: usize, seed: u64, c_std: f64) -> Result<LemmaReport> {
    if !d.is_multiple_of(2) || d < 2 {
        return Err(Error::InvalidParameter(format!("d must be even, got {d}")));
    }
    if samples < 2 {
        return Err(Error::InvalidParameter("need at least two samples".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, 0));
    let u2 = sample_grassmannian(d / 2, d, &mut rng)?;
    let vals: Vec<f64> = (0..samples)
        .map(|_| sample_uniform_sphere(d, &mut rng).map(|y| (u2.basis() * y).norm()))
        .collect::<Result<_>>()?;
    let mean = vals.iter().sum::<f64>() / samples as f64;
    let std = (vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (samples - 1) as f64).sqrt();
    let bound = c_std / (d as f64).sqrt();
    let records = vec![record(0, seed, status(std <= bound), &[("std", std), ("mean", mean)])];
    let mut r = LemmaReport::new(
        "sphere-concentration",
        d,
        seed,
        &[("samples", samples as f64), ("c_std", c_std)],
        records,
    );
    r.stat("std", std);
    r.stat("mean", mean);
    r.stat("std_bound", bound);
    r.stat("std_times_sqrt_d", std * (d as f64).sqrt());
    r.decide(std <= bound, format!("std(f) ≤ {c_std}/√d"));
    Ok(r)
}
