use nalgebra::SymmetricEigen;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::report::{record, status, LemmaReport};
use crate::linalg::gaussian_matrix;
use crate::streaming::derive_seed;
use crate::{Error, Result};

/// Singular values of `G` (`N × d`) from the eigenvalues of `GᵀG`, nonincreasing.
fn gram_singular_values(g: &nalgebra::DMatrix<f64>) -> Vec<f64> {
    let mut ev: Vec<f64> = SymmetricEigen::new(g.tr_mul(g))
        .eigenvalues
        .iter()
        .map(|l| l.max(0.0).sqrt())
        .collect();
    ev.sort_by(|a, b| b.total_cmp(a));
    ev
}

fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let (lo, hi) = (pos.floor() as usize, pos.ceil() as usize);
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

/// Empirical check of `√N − √d − t ≤ σ_min ≤ σ_max ≤ √N + √d + t` for `N × d`
/// standard Gaussian matrices, plus the mid-spectrum ratios `σ_{τd} / ((1 − τ)√d)`.
///
/// Passes when the violation frequency is at most `2e^{−t²/2}` plus three
/// binomial standard deviations.
pub fn singular_value_experiment(n: usize, d: usize, t: f64, trials: usize, seed: u64) -> Result<LemmaReport> {
    if n < d || d == 0 {
        return Err(Error::InvalidParameter(format!("need N ≥ d ≥ 1, got N = {n}, d = {d}")));
    }
    if trials == 0 {
        return Err(Error::InvalidParameter("need at least one trial".into()));
    }
    let taus = [0.5, 0.75, 0.9];
    let (sn, sd) = ((n as f64).sqrt(), (d as f64).sqrt());
    let (lower, upper) = (sn - sd - t, sn + sd + t);
    let mut records = Vec::with_capacity(trials);
    let mut ratios: Vec<Vec<f64>> = vec![Vec::with_capacity(trials); taus.len()];
    for tr in 0..trials {
        let s = derive_seed(seed, tr as u64);
        let g = gaussian_matrix(n, d, 1.0, &mut ChaCha8Rng::seed_from_u64(s));
        let sv = gram_singular_values(&g);
        let (smax, smin) = (sv[0], sv[d - 1]);
        let mut values = vec![("sigma_max", smax), ("sigma_min", smin)];
        for (k, &tau) in taus.iter().enumerate() {
            let idx = ((tau * d as f64).round() as usize).clamp(1, d);
            let ratio = sv[idx - 1] / ((1.0 - tau) * sd);
            ratios[k].push(ratio);
            values.push((["mid_ratio_50", "mid_ratio_75", "mid_ratio_90"][k], ratio));
        }
        records.push(record(tr, s, status(smin >= lower && smax <= upper), &values));
    }
    let p = (2.0 * (-t * t / 2.0).exp()).min(1.0);
    let sigma = (p * (1.0 - p) / trials as f64).sqrt();
    let allowed = p + 3.0 * sigma;
    let mut r = LemmaReport::new(
        "singular-values",
        d,
        seed,
        &[("N", n as f64), ("t", t), ("lower", lower), ("upper", upper)],
        records,
    );
    let violation = 1.0 - r.pass_fraction;
    r.stat("violation_rate", violation);
    r.stat("allowed_violation_rate", allowed);
    for (k, name) in ["50", "75", "90"].iter().enumerate() {
        let mut v = ratios[k].clone();
        v.sort_by(f64::total_cmp);
        r.stat(&format!("mid_ratio_{name}_q05"), quantile(&v, 0.05));
        r.stat(&format!("mid_ratio_{name}_q50"), quantile(&v, 0.5));
        r.stat(&format!("mid_ratio_{name}_q95"), quantile(&v, 0.95));
        let inside = v.iter().filter(|&&x| (0.3..=3.0).contains(&x)).count();
        r.stat(&format!("mid_ratio_{name}_in_envelope"), inside as f64 / v.len() as f64);
    }
    r.decide(violation <= allowed, format!("violation rate ≤ 2e^(−t²/2) + 3σ = {allowed:.4}"));
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::singular_values;

    #[test]
    fn gram_route_matches_svd() {
        let g = gaussian_matrix(30, 20, 1.0, &mut ChaCha8Rng::seed_from_u64(0));
        let a = gram_singular_values(&g);
        let b = singular_values(&g);
        for (x, y) in a.iter().zip(b.values()) {
            assert!((x - y).abs() < 1e-10);
        }
    }

    #[test]
    fn tall_matrices_satisfy_the_lower_edge() {
        let r = singular_value_experiment(64, 32, 3.0, 50, 1).unwrap();
        assert!(r.verdict, "{:?}", r.statistics);
        let (lo, _) = r.column_extremes("sigma_min").unwrap();
        assert!(lo >= 8.0 - 32f64.sqrt() - 3.0);
    }

    #[test]
    fn quantiles_interpolate() {
        assert_eq!(quantile(&[1.0, 2.0, 3.0], 0.5), 2.0);
        assert_eq!(quantile(&[1.0, 3.0], 0.25), 1.5);
    }
}
