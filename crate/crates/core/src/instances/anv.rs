use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::linalg::{gaussian_vector, kernel_vector, sample_uniform_sphere};
use crate::marginal::conditioning_acceptance;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum AnvVariant {
    /// `d − 1` i.i.d. `N(0, I_d)` vectors; loss is `(1/d) Σ (wᵀgᵢ)²`.
    GaussianRaw,
    /// `d − 1` uniform unit vectors conditioned on `|e₁ᵀ ker| ≥ c_f`; loss is `Σ (wᵀθᵢ)²`.
    SphereConditioned { c_f: f64 },
}

/// An approximate-null-vector instance with its exact kernel.
#[derive(Debug, Clone, PartialEq)]
pub struct AnvInstance {
    variant: AnvVariant,
    vectors: Vec<DVector<f64>>,
    witness: DVector<f64>,
    seed: Option<u64>,
}

impl AnvInstance {
    /// Checks every instance invariant.
    pub fn new(
        variant: AnvVariant,
        vectors: Vec<DVector<f64>>,
        witness: DVector<f64>,
        seed: Option<u64>,
    ) -> Result<Self> {
        let d = witness.len();
        if d < 2 {
            return Err(Error::InvalidParameter(format!("ANV instances need d ≥ 2, got {d}")));
        }
        if vectors.len() != d - 1 {
            return Err(Error::DimensionMismatch {
                expected: d - 1,
                found: vectors.len(),
            });
        }
        if (witness.norm() - 1.0).abs() > 1e-10 {
            return Err(Error::NotUnit { norm: witness.norm() });
        }
        for v in &vectors {
            if v.len() != d {
                return Err(Error::DimensionMismatch { expected: d, found: v.len() });
            }
            let r = witness.dot(v).abs();
            if r > 1e-9 {
                return Err(Error::InvalidParameter(format!("witness residual {r:e} exceeds 1e-9")));
            }
        }
        if let AnvVariant::SphereConditioned { c_f } = variant {
            if !(c_f > 0.0 && c_f <= 1.0) {
                return Err(Error::InvalidParameter(format!("c_f must lie in (0, 1], got {c_f}")));
            }
            if let Some(v) = vectors.iter().find(|v| (v.norm() - 1.0).abs() > 1e-10) {
                return Err(Error::NotUnit { norm: v.norm() });
            }
            if witness[0] < c_f {
                return Err(Error::InvalidParameter(format!(
                    "e₁ᵀwitness = {} is below c_f = {c_f}",
                    witness[0]
                )));
            }
        }
        Ok(AnvInstance {
            variant,
            vectors,
            witness,
            seed,
        })
    }

    pub fn dim(&self) -> usize {
        self.witness.len()
    }

    pub fn variant(&self) -> AnvVariant {
        self.variant
    }

    pub fn c_f(&self) -> Option<f64> {
        match self.variant {
            AnvVariant::SphereConditioned { c_f } => Some(c_f),
            AnvVariant::GaussianRaw => None,
        }
    }

    pub fn vectors(&self) -> &[DVector<f64>] {
        &self.vectors
    }

    pub fn witness(&self) -> &DVector<f64> {
        &self.witness
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }
}

pub(crate) fn check_dim(d: usize) -> Result<()> {
    if d < 2 {
        return Err(Error::InvalidParameter(format!("need d ≥ 2, got {d}")));
    }
    Ok(())
}

pub(crate) fn check_c_f(c_f: f64) -> Result<()> {
    if !(c_f > 0.0 && c_f < 1.0) {
        return Err(Error::InvalidParameter(format!("c_f must lie in (0, 1), got {c_f}")));
    }
    Ok(())
}

pub fn gen_anv_gaussian(d: usize, seed: u64) -> Result<AnvInstance> {
    check_dim(d)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut last = None;
    for _ in 0..2 {
        let vectors: Vec<DVector<f64>> = (0..d - 1).map(|_| gaussian_vector(d, &mut rng)).collect();
        match kernel_vector(&vectors) {
            Ok(w) => return AnvInstance::new(AnvVariant::GaussianRaw, vectors, w, Some(seed)),
            Err(e) => last = Some(e),
        }
    }
    Err(last.expect("loop ran"))
}

/// One rejection-sampling attempt: `d − 1` uniform unit vectors, kept iff `|e₁ᵀ ker| ≥ c_f`.
///
/// An accepted draw has its witness oriented so that `e₁ᵀw* ≥ c_f`.
pub fn try_conditioned_draw<R: Rng + ?Sized>(d: usize, c_f: f64, rng: &mut R) -> Result<Option<AnvInstance>> {
    check_dim(d)?;
    check_c_f(c_f)?;
    let vectors = (0..d - 1)
        .map(|_| sample_uniform_sphere(d, rng))
        .collect::<Result<Vec<_>>>()?;
    let mut w = match kernel_vector(&vectors) {
        Ok(w) => w,
        Err(Error::RankDeficient { .. }) => return Ok(None),
        Err(e) => return Err(e),
    };
    if w[0].abs() < c_f {
        return Ok(None);
    }
    if w[0] < 0.0 {
        w.neg_mut();
    }
    AnvInstance::new(AnvVariant::SphereConditioned { c_f }, vectors, w, None).map(Some)
}

/// Refuses up front when fewer than one acceptance is expected within `max_attempts`.
pub(crate) fn check_feasible(d: usize, c_f: f64, max_attempts: usize) -> Result<f64> {
    let p = conditioning_acceptance(d, c_f)?;
    if p * (max_attempts as f64) < 1.0 {
        return Err(Error::AcceptanceTooRare {
            attempts: max_attempts,
            acceptance_probability: p,
        });
    }
    Ok(p)
}

/// Exact draw from the uniform law conditioned on `|e₁ᵀ ker(θ₁ … θ_{d−1})| ≥ c_f`.
pub fn gen_anv_conditioned(d: usize, c_f: f64, seed: u64, max_attempts: usize) -> Result<AnvInstance> {
    check_dim(d)?;
    check_c_f(c_f)?;
    let p = check_feasible(d, c_f, max_attempts)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..max_attempts {
        if let Some(mut inst) = try_conditioned_draw(d, c_f, &mut rng)? {
            inst.seed = Some(seed);
            return Ok(inst);
        }
    }
    Err(Error::AcceptanceTooRare {
        attempts: max_attempts,
        acceptance_probability: p,
    })
}

/// ANV loss: `(1/d) Σ (wᵀgᵢ)²` for Gaussian instances, `Σ (wᵀθᵢ)²` for conditioned ones.
pub fn anv_loss(inst: &AnvInstance, w: &DVector<f64>) -> Result<f64> {
    if w.len() != inst.dim() {
        return Err(Error::DimensionMismatch {
            expected: inst.dim(),
            found: w.len(),
        });
    }
    let norm = w.norm();
    if (norm - 1.0).abs() > 1e-6 {
        return Err(Error::NotUnit { norm });
    }
    let sum: f64 = inst.vectors.iter().map(|v| v.dot(w).powi(2)).sum();
    Ok(match inst.variant {
        AnvVariant::GaussianRaw => sum / inst.dim() as f64,
        AnvVariant::SphereConditioned { .. } => sum,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{singular_decomposition, stack_rows, unit_vector};

    #[test]
    fn two_dimensional_gaussian_witness_is_the_cross() {
        let inst = gen_anv_gaussian(2, 3).unwrap();
        let g = &inst.vectors()[0];
        let w = inst.witness();
        assert!(w.dot(g).abs() < 1e-15);
        let cross = DVector::from_vec(vec![-g[1], g[0]]) / g.norm();
        assert!((w.dot(&cross).abs() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn gaussian_norms_concentrate() {
        let inst = gen_anv_gaussian(100, 1).unwrap();
        let mean = inst.vectors().iter().map(|g| g.norm_squared() / 100.0).sum::<f64>() / 99.0;
        assert!((mean - 1.0).abs() < 0.2, "{mean}");
    }

    #[test]
    fn gaussian_witness_matches_svd_null_space() {
        let inst = gen_anv_gaussian(50, 2).unwrap();
        let (_, v) = singular_decomposition(&stack_rows(inst.vectors()).unwrap());
        let oracle = v.row(49).transpose();
        assert!((inst.witness().dot(&oracle).abs() - 1.0).abs() < 1e-10);
        let residual = inst.vectors().iter().map(|g| g.dot(inst.witness()).abs()).fold(0.0, f64::max);
        assert!(residual < 1e-10);
    }

    #[test]
    fn conditioned_instances_satisfy_the_event() {
        for seed in 0..5 {
            let inst = gen_anv_conditioned(16, 0.2, seed, 1000).unwrap();
            assert!(inst.witness()[0] >= 0.2);
            assert!(inst.vectors().iter().all(|v| (v.norm() - 1.0).abs() < 1e-10));
            assert_eq!(inst, gen_anv_conditioned(16, 0.2, seed, 1000).unwrap());
        }
    }

    #[test]
    fn vanishing_threshold_accepts_immediately() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let accepted = (0..20)
            .filter(|_| try_conditioned_draw(8, 1e-9, &mut rng).unwrap().is_some())
            .count();
        assert_eq!(accepted, 20);
    }

    #[test]
    fn infeasible_conditioning_is_refused() {
        match gen_anv_conditioned(1024, 0.2, 0, 10_000) {
            Err(Error::AcceptanceTooRare {
                acceptance_probability, ..
            }) => assert!(acceptance_probability < 1e-6),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn losses_at_the_witness_vanish() {
        let g = gen_anv_gaussian(20, 4).unwrap();
        assert!(anv_loss(&g, g.witness()).unwrap() < 1e-18);
        let s = gen_anv_conditioned(20, 0.2, 4, 1000).unwrap();
        assert!(anv_loss(&s, s.witness()).unwrap() < 1e-18);
        let half = g.witness() * 0.5;
        assert!(matches!(anv_loss(&g, &half), Err(Error::NotUnit { .. })));
    }

    #[test]
    fn random_directions_have_loss_near_one() {
        let d = 200;
        let mut rng = ChaCha8Rng::seed_from_u64(200);
        let (mut gauss, mut sphere) = (0.0, 0.0);
        let trials = 100;
        for t in 0..trials {
            let w = sample_uniform_sphere(d, &mut rng).unwrap();
            gauss += anv_loss(&gen_anv_gaussian(d, t).unwrap(), &w).unwrap();
            // Uniform vectors without conditioning: the loss formula ignores c_f.
            let thetas: Vec<_> = (0..d - 1).map(|_| sample_uniform_sphere(d, &mut rng).unwrap()).collect();
            sphere += thetas.iter().map(|th| th.dot(&w).powi(2)).sum::<f64>();
        }
        let expected = (d - 1) as f64 / d as f64;
        assert!((gauss / trials as f64 - expected).abs() < 0.05);
        assert!((sphere / trials as f64 - expected).abs() < 0.05);
    }

    #[test]
    fn invariants_are_enforced() {
        let e1 = unit_vector(3, 0);
        let bad = AnvInstance::new(AnvVariant::GaussianRaw, vec![e1.clone(), unit_vector(3, 1)], e1.clone(), None);
        assert!(bad.is_err());
        let low = AnvInstance::new(
            AnvVariant::SphereConditioned { c_f: 0.5 },
            vec![unit_vector(3, 0), unit_vector(3, 1)],
            unit_vector(3, 2),
            None,
        );
        assert!(low.is_err());
    }
}
