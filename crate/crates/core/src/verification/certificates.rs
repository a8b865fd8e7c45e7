use nalgebra::{DMatrix, SymmetricEigen};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::report::{record, status, LemmaReport, TrialStatus};
use crate::linalg::{
    chordal_distance, complement, gaussian_matrix, min_eig_projector_sum, orthonormalize, sample_grassmannian,
    singular_values, Subspace,
};
use crate::streaming::derive_seed;
use crate::{Error, Result};

fn trial_rng(seed: u64, trial: usize) -> (u64, ChaCha8Rng) {
    let s = derive_seed(seed, trial as u64);
    (s, ChaCha8Rng::seed_from_u64(s))
}

fn check_even(d: usize, min: usize) -> Result<()> {
    if !d.is_multiple_of(2) || d < min {
        return Err(Error::InvalidParameter(format!("d must be even and at least {min}, got {d}")));
    }
    Ok(())
}

/// `min_{w ∈ W, ‖w‖=1} ‖Proj_{V₂} w‖` for a random `q`-dimensional `W ⊂ V₁⊥`.
fn subspace_probe(v1: &Subspace, v2: &Subspace, q: usize, rng: &mut ChaCha8Rng) -> Result<f64> {
    let perp = complement(v1);
    let inner = sample_grassmannian(q, perp.dim(), rng)?;
    let w = inner.basis() * perp.basis();
    Ok(singular_values(&(w * v2.basis().transpose()).transpose()).min())
}

/// Certifies that no unit vector is nearly orthogonal to all of `V₁, V₂ ∈ Gr(d/2, d)`
/// and `U ∈ Gr(d/2 − 1, d)` once `d(V₁, V₂)² ≥ δd/2`.
///
/// A trial passes iff `λ_min(P_{V₁} + P_{V₂} + P_U) ≥ 3c²`, which makes
/// `max ‖Proj(v)‖ ≥ c` for every unit `v`. Trials whose pair violates the
/// distance hypothesis are skipped. The statistics include the forced
/// `V₂ = V₁` control and the `λ_min(P_V + P_U)` null check.
pub fn certify_no_joint_sol(d: usize, delta: f64, c_emp: f64, trials: usize, seed: u64) -> Result<LemmaReport> {
    check_even(d, 8)?;
    let threshold = 3.0 * c_emp * c_emp;
    let probe_dim = (d / 8).max(1);
    let mut records = Vec::with_capacity(trials);
    let mut control = 0.0f64;
    let mut pair_null = 0.0f64;
    for t in 0..trials {
        let (s, mut rng) = trial_rng(seed, t);
        let v1 = sample_grassmannian(d / 2, d, &mut rng)?;
        let v2 = sample_grassmannian(d / 2, d, &mut rng)?;
        let u = sample_grassmannian(d / 2 - 1, d, &mut rng)?;
        let dist_sq = chordal_distance(&v1, &v2)?.powi(2);
        pair_null = pair_null.max(min_eig_projector_sum(&[v1.clone(), u.clone()])?.lambda_min);
        if t == 0 {
            control = min_eig_projector_sum(&[v1.clone(), v1.clone(), u.clone()])?.lambda_min;
        }
        if dist_sq < delta * d as f64 / 2.0 {
            records.push(record(t, s, TrialStatus::Skip, &[("chordal_sq", dist_sq)]));
            continue;
        }
        let lambda = min_eig_projector_sum(&[v1.clone(), v2.clone(), u])?.lambda_min;
        let probe = subspace_probe(&v1, &v2, probe_dim, &mut rng)?;
        records.push(record(
            t,
            s,
            status(lambda >= threshold),
            &[
                ("chordal_sq", dist_sq),
                ("lambda_min", lambda),
                ("max_projection_lower", (lambda / 3.0).sqrt()),
                ("probe_min_projection", probe),
            ],
        ));
    }
    let mut r = LemmaReport::new(
        "no-joint-sol",
        d,
        seed,
        &[("delta", delta), ("c_emp", c_emp), ("probe_dim", probe_dim as f64)],
        records,
    );
    if let Some((lo, _)) = r.column_extremes("lambda_min") {
        r.stat("min_lambda_min", lo);
    }
    if let Some((lo, _)) = r.column_extremes("probe_min_projection") {
        r.stat("min_probe_projection", lo);
    }
    r.stat("control_lambda_min", control);
    r.stat("max_pair_lambda_min", pair_null);
    let ok = r.statistics["evaluated"] > 0.0 && r.pass_fraction == 1.0 && control <= 1e-10;
    r.decide(ok, "all evaluated trials have λ_min ≥ 3c²; control λ_min ≤ 1e-10");
    Ok(r)
}

/// Extreme generalized Rayleigh quotients of `ρ(v) = (‖P_V v‖² + ‖P_U v‖²) / ‖Gv‖²`
/// over the row space of `G`, where `V` spans the first `split` rows and `U` the rest.
///
/// Both forms vanish on the kernel of `G`, so the pencil is reduced to an
/// orthonormal basis `Q` of the row space and solved via Cholesky.
pub fn sandwich_extremes(g: &DMatrix<f64>, split: usize) -> Result<(f64, f64)> {
    let n = g.nrows();
    if split == 0 || split >= n {
        return Err(Error::InvalidParameter(format!("split must lie in 1..{n}, got {split}")));
    }
    let q = orthonormalize(g)?;
    if q.dim() != n {
        return Err(Error::RankDeficient { rank: q.dim(), expected: n });
    }
    let v = orthonormalize(&g.rows(0, split).into_owned())?;
    let u = orthonormalize(&g.rows(split, n - split).into_owned())?;
    let qb = q.basis();
    let qv = qb * v.basis().transpose();
    let qu = qb * u.basis().transpose();
    let a = &qv * qv.transpose() + &qu * qu.transpose();
    let k = qb * g.transpose();
    let b = &k * k.transpose();
    let chol = b.cholesky().ok_or(Error::RankDeficient { rank: 0, expected: n })?;
    let l = chol.l();
    let li_a = l
        .solve_lower_triangular(&a)
        .ok_or(Error::RankDeficient { rank: 0, expected: n })?;
    let c = l
        .solve_lower_triangular(&li_a.transpose())
        .ok_or(Error::RankDeficient { rank: 0, expected: n })?;
    let sym = (&c + c.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym).eigenvalues;
    Ok((eig.min(), eig.max()))
}

/// `(lower, upper) = ((1 + (1+t)√k)^{−2}, (1 − (1+t)√k)^{−2})`.
pub fn sandwich_bounds(t: f64, k: f64) -> Result<(f64, f64)> {
    let s = (1.0 + t) * k.sqrt();
    if s >= 1.0 {
        return Err(Error::InvalidParameter(format!("need (1 + t)√k < 1, got {s}")));
    }
    Ok(((1.0 + s).powi(-2), (1.0 - s).powi(-2)))
}

/// Checks the two-sided equivalence between `‖Gv‖²` and `‖P_V v‖² + ‖P_U v‖²` for
/// `G ∈ ℝ^{(d−1)×d}` with `N(0, 1/d)` entries split into `d/2` and `d/2 − 1` rows.
pub fn certify_sandwich(d: usize, t: f64, trials: usize, seed: u64, min_pass: f64) -> Result<LemmaReport> {
    check_even(d, 4)?;
    let k = 0.5f64.max(0.5 - 1.0 / d as f64);
    let (lower, upper) = sandwich_bounds(t, k)?;
    let std = 1.0 / (d as f64).sqrt();
    let mut records = Vec::with_capacity(trials);
    for tr in 0..trials {
        let (s, mut rng) = trial_rng(seed, tr);
        let g = gaussian_matrix(d - 1, d, std, &mut rng);
        let (lo, hi) = sandwich_extremes(&g, d / 2)?;
        records.push(record(tr, s, status(lo >= lower && hi <= upper), &[("rho_min", lo), ("rho_max", hi)]));
    }
    // Control: orthonormal rows force ρ ≡ 1.
    let mut rng = trial_rng(seed, trials).1;
    let q = orthonormalize(&gaussian_matrix(d - 1, d, 1.0, &mut rng))?;
    let (clo, chi) = sandwich_extremes(q.basis(), d / 2)?;
    let mut r = LemmaReport::new(
        "sandwich",
        d,
        seed,
        &[("t", t), ("k", k), ("lower", lower), ("upper", upper), ("min_pass", min_pass)],
        records,
    );
    if let Some((lo, _)) = r.column_extremes("rho_min") {
        r.stat("min_rho", lo);
    }
    if let Some((_, hi)) = r.column_extremes("rho_max") {
        r.stat("max_rho", hi);
    }
    r.stat("control_deviation", (clo - 1.0).abs().max((chi - 1.0).abs()));
    let ok = r.pass_fraction >= min_pass;
    r.decide(ok, format!("pass fraction ≥ {min_pass} with ρ inside [{lower:.4}, {upper:.4}]"));
    Ok(r)
}

/// Checks `d(U, V) = d(U⊥, V⊥)` on independent pairs from `Gr(d/2, d)`.
pub fn certify_comorth(d: usize, trials: usize, seed: u64) -> Result<LemmaReport> {
    check_even(d, 2)?;
    let mut records = Vec::with_capacity(trials);
    for t in 0..trials {
        let (s, mut rng) = trial_rng(seed, t);
        let u = sample_grassmannian(d / 2, d, &mut rng)?;
        let v = sample_grassmannian(d / 2, d, &mut rng)?;
        let a = chordal_distance(&u, &v)?;
        let b = chordal_distance(&complement(&u), &complement(&v))?;
        let dev = (a - b).abs();
        records.push(record(t, s, status(dev <= 1e-8), &[("distance", a), ("deviation", dev)]));
    }
    let mut r = LemmaReport::new("comorth", d, seed, &[], records);
    let max_dev = r.column_extremes("deviation").map_or(0.0, |e| e.1);
    r.stat("max_deviation", max_dev);
    let ok = r.pass_fraction == 1.0;
    r.decide(ok, "every |d(U,V) − d(U⊥,V⊥)| ≤ 1e-8");
    Ok(r)
}
