use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use super::subspace::{orthonormalize, Subspace};
use crate::{Error, Result};

/// Matrix with i.i.d. `N(0, std²)` entries.
pub fn gaussian_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, std: f64, rng: &mut R) -> DMatrix<f64> {
    // Filled row by row so the draw order does not depend on storage order.
    let mut m = DMatrix::zeros(rows, cols);
    for r in 0..rows {
        for c in 0..cols {
            let z: f64 = rng.sample(StandardNormal);
            m[(r, c)] = std * z;
        }
    }
    m
}

pub fn gaussian_vector<R: Rng + ?Sized>(d: usize, rng: &mut R) -> DVector<f64> {
    DVector::from_fn(d, |_, _| rng.sample(StandardNormal))
}

/// Rotation-invariant unit vector in ℝ^d (a normalized standard Gaussian).
pub fn sample_uniform_sphere<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Result<DVector<f64>> {
    if d == 0 {
        return Err(Error::ZeroDimensional);
    }
    loop {
        let g = gaussian_vector(d, rng);
        let n = g.norm();
        if n > 0.0 {
            return Ok(g / n);
        }
    }
}

/// Uniform unit vector inside the subspace `s`.
pub fn sample_uniform_subsphere<R: Rng + ?Sized>(s: &Subspace, rng: &mut R) -> Result<DVector<f64>> {
    if s.dim() == 0 {
        return Err(Error::ZeroDimensional);
    }
    let c = sample_uniform_sphere(s.dim(), rng)?;
    s.lift(&c)
}

/// Haar-distributed element of Gr(k, d): the span of a `k × d` Gaussian matrix.
pub fn sample_grassmannian<R: Rng + ?Sized>(k: usize, d: usize, rng: &mut R) -> Result<Subspace> {
    if k == 0 || k > d {
        return Err(Error::InvalidParameter(format!("need 1 ≤ k ≤ d, got k = {k}, d = {d}")));
    }
    // Rank deficiency has probability zero; retry covers floating-point accidents.
    for _ in 0..8 {
        let g = gaussian_matrix(k, d, 1.0, rng);
        let s = orthonormalize(&g)?;
        if s.dim() == k {
            return Ok(s);
        }
    }
    Err(Error::RankDeficient { rank: 0, expected: k })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::chordal_distance;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn one_dimensional_sphere_is_a_fair_sign() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut plus = 0;
        for _ in 0..4000 {
            let v = sample_uniform_sphere(1, &mut rng).unwrap();
            assert_eq!(v[0].abs(), 1.0);
            if v[0] > 0.0 {
                plus += 1;
            }
        }
        // 4σ binomial band around 2000.
        assert!((plus as i64 - 2000).abs() < 127, "{plus}");
        assert_eq!(sample_uniform_sphere(0, &mut rng), Err(Error::ZeroDimensional));
    }

    #[test]
    fn sphere_mean_is_near_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(16);
        let d = 16;
        let n = 100_000;
        let mut mean = DVector::zeros(d);
        for _ in 0..n {
            let v = sample_uniform_sphere(d, &mut rng).unwrap();
            assert!((v.norm() - 1.0).abs() < 1e-12);
            mean += v;
        }
        mean /= n as f64;
        assert!(mean.amax() < 0.02, "{}", mean.amax());
    }

    #[test]
    fn subsphere_stays_in_subspace() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let s = Subspace::coordinate(4, &[0, 1]).unwrap();
        for _ in 0..100 {
            let v = sample_uniform_subsphere(&s, &mut rng).unwrap();
            assert_eq!(v[2], 0.0);
            assert_eq!(v[3], 0.0);
            assert!((v.norm() - 1.0).abs() < 1e-12);
        }
        assert_eq!(sample_uniform_subsphere(&Subspace::zero(3), &mut rng), Err(Error::ZeroDimensional));
    }

    #[test]
    fn full_grassmannian_is_the_whole_space() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let s = sample_grassmannian(5, 5, &mut rng).unwrap();
        assert!(chordal_distance(&s, &Subspace::full(5)).unwrap() < 1e-12);
        assert!(sample_grassmannian(0, 5, &mut rng).is_err());
        assert!(sample_grassmannian(6, 5, &mut rng).is_err());
    }

    #[test]
    fn mean_squared_chordal_distance_matches_k_times_codim_over_d() {
        // E Σ sin²θᵢ = k(d − k)/d for independent Haar subspaces.
        let mut rng = ChaCha8Rng::seed_from_u64(40);
        let d = 40;
        let k = d / 2;
        let trials = 200;
        let mut total = 0.0;
        for _ in 0..trials {
            let u = sample_grassmannian(k, d, &mut rng).unwrap();
            let v = sample_grassmannian(k, d, &mut rng).unwrap();
            total += chordal_distance(&u, &v).unwrap().powi(2);
        }
        let mean = total / trials as f64;
        let expected = (k * (d - k)) as f64 / d as f64;
        assert!((mean - expected).abs() < 0.1 * expected, "{mean} vs {expected}");
    }

    #[test]
    fn random_lines_in_the_plane_have_uniform_angle() {
        // Oracle CDF of the angle to e₁ on [0, π/2]: F(θ) = 2θ/π.
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let e1 = Subspace::coordinate(2, &[0]).unwrap();
        let n = 5000;
        let mut angles: Vec<f64> = (0..n)
            .map(|_| {
                let l = sample_grassmannian(1, 2, &mut rng).unwrap();
                crate::linalg::principal_angles(&e1, &l).unwrap()[0]
            })
            .collect();
        angles.sort_by(f64::total_cmp);
        let ks = angles
            .iter()
            .enumerate()
            .map(|(i, &t)| {
                let f = 2.0 * t / std::f64::consts::PI;
                (f - i as f64 / n as f64).abs().max(((i + 1) as f64 / n as f64 - f).abs())
            })
            .fold(0.0, f64::max);
        // 1.63/√n is the 1% critical value.
        assert!(ks < 1.63 / (n as f64).sqrt(), "{ks}");
    }
}
