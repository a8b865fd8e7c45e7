use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::anv::{check_c_f, check_feasible, AnvInstance, AnvVariant};
use crate::linalg::{kernel_vector_of_rows, sample_grassmannian, sample_uniform_sphere, sample_uniform_subsphere, Subspace};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledPoint {
    pub x: DVector<f64>,
    /// `±1`.
    pub y: i8,
}

impl LabeledPoint {
    pub fn new(x: DVector<f64>, y: i8) -> Result<Self> {
        if y != 1 && y != -1 {
            return Err(Error::InvalidParameter(format!("labels must be ±1, got {y}")));
        }
        Ok(LabeledPoint { x, y })
    }

    pub fn sign(&self) -> f64 {
        self.y as f64
    }
}

/// Labeled points with a separator whose margin is at least `margin`.
#[derive(Debug, Clone, PartialEq)]
pub struct LspDataset {
    points: Vec<LabeledPoint>,
    witness: DVector<f64>,
    margin: f64,
    params: BTreeMap<String, f64>,
    seed: Option<u64>,
}

impl LspDataset {
    pub fn new(
        points: Vec<LabeledPoint>,
        witness: DVector<f64>,
        margin: f64,
        params: BTreeMap<String, f64>,
        seed: Option<u64>,
    ) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptyList);
        }
        let d = witness.len();
        if (witness.norm() - 1.0).abs() > 1e-10 {
            return Err(Error::NotUnit { norm: witness.norm() });
        }
        if !(margin > 0.0) {
            return Err(Error::InvalidParameter(format!("margin must be positive, got {margin}")));
        }
        for p in &points {
            if p.x.len() != d {
                return Err(Error::DimensionMismatch { expected: d, found: p.x.len() });
            }
            if p.y != 1 && p.y != -1 {
                return Err(Error::InvalidParameter(format!("labels must be ±1, got {}", p.y)));
            }
        }
        let ds = LspDataset {
            points,
            witness,
            margin,
            params,
            seed,
        };
        let actual = margin_of(&ds.witness, &ds)?;
        if actual < margin - 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "witness margin {actual:e} is below the claimed {margin:e}"
            )));
        }
        Ok(ds)
    }

    pub fn dim(&self) -> usize {
        self.witness.len()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[LabeledPoint] {
        &self.points
    }

    pub fn witness(&self) -> &DVector<f64> {
        &self.witness
    }

    pub fn margin(&self) -> f64 {
        self.margin
    }

    pub fn params(&self) -> &BTreeMap<String, f64> {
        &self.params
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }
}

/// The two shifted copies `θ ± c₄e₁/√d` a separator sees for one ANV vector, `+` first.
pub fn shifted_pair(theta: &DVector<f64>, c4: f64) -> [LabeledPoint; 2] {
    let d = theta.len();
    let shift = c4 / (d as f64).sqrt();
    let mut plus = theta.clone();
    plus[0] += shift;
    let mut minus = theta.clone();
    minus[0] -= shift;
    [LabeledPoint { x: plus, y: 1 }, LabeledPoint { x: minus, y: -1 }]
}

/// Separator instance induced by a conditioned ANV instance.
pub fn gen_lsp_from_anv(inst: &AnvInstance, c4: f64) -> Result<LspDataset> {
    let AnvVariant::SphereConditioned { c_f } = inst.variant() else {
        return Err(Error::InvalidParameter("the separator reduction needs a conditioned instance".into()));
    };
    if !(c4 > 0.0) {
        return Err(Error::InvalidParameter(format!("c4 must be positive, got {c4}")));
    }
    let d = inst.dim();
    let points: Vec<LabeledPoint> = inst.vectors().iter().flat_map(|th| shifted_pair(th, c4)).collect();
    let max_norm = points.iter().map(|p| p.x.norm()).fold(0.0, f64::max);
    let margin = c_f * c4 / (d as f64).sqrt() / max_norm;
    let params = BTreeMap::from([("c_f".to_string(), c_f), ("c4".to_string(), c4)]);
    LspDataset::new(points, inst.witness().clone(), margin, params, inst.seed())
}

/// One draw from `D_S`: a uniform unit `x′ ∈ S`, shifted by `±(c/4)e₁/√d` with a fair label.
pub fn sample_dv<R: Rng + ?Sized>(s: &Subspace, c: f64, rng: &mut R) -> Result<LabeledPoint> {
    if !(c > 0.0) {
        return Err(Error::InvalidParameter(format!("c must be positive, got {c}")));
    }
    let mut x = sample_uniform_subsphere(s, rng)?;
    let y: i8 = if rng.random_bool(0.5) { 1 } else { -1 };
    x[0] += y as f64 * c / 4.0 / (s.ambient_dim() as f64).sqrt();
    Ok(LabeledPoint { x, y })
}

/// The hard separator instance: `m` draws from `D_V` followed by `m` draws from `D_U`,
/// with `(V, U)` conditioned on `|e₁ᵀ ker(V ⊕ U)| ≥ c_f`.
pub fn gen_lsp_hard(
    d: usize,
    m: usize,
    c_f: f64,
    c: f64,
    seed: u64,
    max_attempts: usize,
) -> Result<(LspDataset, Subspace, Subspace)> {
    if d < 4 || !d.is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!("d must be even and at least 4, got {d}")));
    }
    if m < d {
        return Err(Error::InvalidParameter(format!("need m ≥ d, got m = {m}, d = {d}")));
    }
    check_c_f(c_f)?;
    let p = check_feasible(d, c_f, max_attempts)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..max_attempts {
        let v = sample_grassmannian(d / 2, d, &mut rng)?;
        let u = sample_grassmannian(d / 2 - 1, d, &mut rng)?;
        let mut rows = DMatrix::zeros(d - 1, d);
        rows.rows_mut(0, d / 2).copy_from(v.basis());
        rows.rows_mut(d / 2, d / 2 - 1).copy_from(u.basis());
        let mut w = match kernel_vector_of_rows(&rows) {
            Ok(w) => w,
            Err(Error::RankDeficient { .. }) => continue,
            Err(e) => return Err(e),
        };
        if w[0].abs() < c_f {
            continue;
        }
        if w[0] < 0.0 {
            w.neg_mut();
        }
        let mut points = Vec::with_capacity(2 * m);
        for s in [&v, &u] {
            for _ in 0..m {
                points.push(sample_dv(s, c, &mut rng)?);
            }
        }
        let margin = measured_margin(&w, &points);
        let params = BTreeMap::from([
            ("c_f".to_string(), c_f),
            ("c".to_string(), c),
            ("m".to_string(), m as f64),
        ]);
        let ds = LspDataset::new(points, w, margin, params, Some(seed))?;
        return Ok((ds, v, u));
    }
    Err(Error::AcceptanceTooRare {
        attempts: max_attempts,
        acceptance_probability: p,
    })
}

/// Synthetic family with margin exactly `gamma`: unit points `yγw* + √(1−γ²)z`,
/// `z` uniform on the unit sphere of `w*⊥`, fair labels, `w*` uniform.
pub fn gen_lsp_margin(d: usize, m: usize, gamma: f64, seed: u64) -> Result<LspDataset> {
    if d < 2 {
        return Err(Error::InvalidParameter(format!("need d ≥ 2, got {d}")));
    }
    if m == 0 {
        return Err(Error::EmptyList);
    }
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::InvalidParameter(format!("gamma must lie in (0, 1), got {gamma}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let w = sample_uniform_sphere(d, &mut rng)?;
    let side = (1.0 - gamma * gamma).sqrt();
    let mut points = Vec::with_capacity(m);
    for _ in 0..m {
        let g = sample_uniform_sphere(d, &mut rng)?;
        let mut z = &g - &w * w.dot(&g);
        let n = z.norm();
        if n == 0.0 {
            continue;
        }
        z /= n;
        let y: i8 = if rng.random_bool(0.5) { 1 } else { -1 };
        points.push(LabeledPoint {
            x: &w * (y as f64 * gamma) + z * side,
            y,
        });
    }
    let margin = measured_margin(&w, &points).min(gamma);
    let params = BTreeMap::from([("gamma".to_string(), gamma), ("m".to_string(), m as f64)]);
    LspDataset::new(points, w, margin, params, Some(seed))
}

fn measured_margin(w: &DVector<f64>, points: &[LabeledPoint]) -> f64 {
    points
        .iter()
        .map(|p| w.dot(&p.x) * p.sign() / p.x.norm())
        .fold(f64::INFINITY, f64::min)
}

fn check_len(w: &DVector<f64>, ds: &LspDataset) -> Result<()> {
    if w.len() != ds.dim() {
        return Err(Error::DimensionMismatch {
            expected: ds.dim(),
            found: w.len(),
        });
    }
    Ok(())
}

/// `min wᵀxᵢyᵢ / ‖xᵢ‖` (for unit `w`).
pub fn margin_of(w: &DVector<f64>, ds: &LspDataset) -> Result<f64> {
    check_len(w, ds)?;
    Ok(measured_margin(w, &ds.points))
}

/// Fraction of points with `wᵀxᵢyᵢ ≤ 0`.
pub fn classification_error(w: &DVector<f64>, ds: &LspDataset) -> Result<f64> {
    check_len(w, ds)?;
    Ok(points_error(w, &ds.points))
}

pub(crate) fn points_error(w: &DVector<f64>, points: &[LabeledPoint]) -> f64 {
    let wrong = points.iter().filter(|p| w.dot(&p.x) * p.sign() <= 0.0).count();
    wrong as f64 / points.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::gen_anv_conditioned;
    use crate::linalg::{project, unit_vector};

    #[test]
    fn hand_computed_two_dimensional_reduction() {
        let inst = AnvInstance::new(
            AnvVariant::SphereConditioned { c_f: 1.0 },
            vec![unit_vector(2, 1)],
            unit_vector(2, 0),
            None,
        )
        .unwrap();
        let c4 = 0.3;
        let ds = gen_lsp_from_anv(&inst, c4).unwrap();
        let s = c4 / 2f64.sqrt();
        assert_eq!(ds.points()[0].x.as_slice(), &[s, 1.0]);
        assert_eq!(ds.points()[0].y, 1);
        assert_eq!(ds.points()[1].x.as_slice(), &[-s, 1.0]);
        assert_eq!(ds.points()[1].y, -1);
        let norm = (1.0 + s * s).sqrt();
        assert!((ds.margin() - s / norm).abs() < 1e-15);
        assert!((margin_of(ds.witness(), &ds).unwrap() - s / norm).abs() < 1e-15);
    }

    #[test]
    fn witness_separates_reduced_instance() {
        let inst = gen_anv_conditioned(100, 0.2, 3, 10_000).unwrap();
        let ds = gen_lsp_from_anv(&inst, 0.3).unwrap();
        assert_eq!(ds.len(), 198);
        assert_eq!(classification_error(ds.witness(), &ds).unwrap(), 0.0);
        assert!(margin_of(ds.witness(), &ds).unwrap() >= 0.9 * 0.2 * 0.3 / 10.0);
        let flipped = -ds.witness();
        assert_eq!(classification_error(&flipped, &ds).unwrap(), 1.0);
    }

    #[test]
    fn dv_on_a_line_is_enumerable() {
        let s = Subspace::coordinate(2, &[1]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let shift = 0.1 / 2f64.sqrt();
        for _ in 0..50 {
            let p = sample_dv(&s, 0.4, &mut rng).unwrap();
            assert_eq!(p.x[1].abs(), 1.0);
            assert!((p.x[0] - p.sign() * shift).abs() < 1e-16);
        }
    }

    #[test]
    fn dv_labels_are_balanced() {
        let s = Subspace::coordinate(4, &[1, 2]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let plus = (0..10_000).filter(|_| sample_dv(&s, 0.2, &mut rng).unwrap().y == 1).count();
        assert!((plus as f64 / 1e4 - 0.5).abs() < 0.02);
    }

    fn projection_std(s: &Subspace, alpha: f64, scale: f64, seed: u64) -> f64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        // w with ‖Proj_S w‖ = α: mix a unit vector of S with one of S⊥.
        let inside = sample_uniform_subsphere(s, &mut rng).unwrap();
        let outside = sample_uniform_subsphere(&crate::linalg::complement(s), &mut rng).unwrap();
        let w = inside * alpha + outside * (1.0 - alpha * alpha).sqrt();
        assert!((project(s, &w).unwrap().norm() - alpha).abs() < 1e-12);
        assert!((w.norm() - 1.0).abs() < 1e-12);
        let n = 10_000;
        let vals: Vec<f64> = (0..n)
            .map(|_| {
                let x = sample_uniform_subsphere(s, &mut rng).unwrap();
                scale * w.dot(&x)
            })
            .collect();
        let mean = vals.iter().sum::<f64>() / n as f64;
        (vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
    }

    #[test]
    fn projected_coordinate_has_std_alpha() {
        let d = 256;
        let alpha = 0.6;
        // In a k-dimensional S, √k·wᵀx′ has standard deviation α exactly.
        let half = sample_grassmannian(d / 2, d, &mut ChaCha8Rng::seed_from_u64(2)).unwrap();
        let std = projection_std(&half, alpha, ((d / 2) as f64).sqrt(), 3);
        assert!((std - alpha).abs() < 0.05 * alpha, "{std}");
    }

    #[test]
    fn hard_instance_witness_margin() {
        let (ds, v, u) = gen_lsp_hard(64, 256, 0.2, 0.2, 1, 10_000).unwrap();
        assert_eq!(ds.len(), 512);
        assert_eq!((v.dim(), u.dim()), (32, 31));
        assert!(ds.margin() >= 0.9 * 0.2 * 0.05 / 8.0, "{}", ds.margin());
        assert_eq!(classification_error(ds.witness(), &ds).unwrap(), 0.0);
        assert!(gen_lsp_hard(7, 256, 0.2, 0.2, 1, 100).is_err());
        assert!(gen_lsp_hard(64, 10, 0.2, 0.2, 1, 100).is_err());
    }

    #[test]
    fn directions_inside_v_misclassify_dv() {
        let d = 256;
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let v = sample_grassmannian(d / 2, d, &mut rng).unwrap();
        let w = sample_uniform_subsphere(&v, &mut rng).unwrap();
        let pts: Vec<LabeledPoint> = (0..4000).map(|_| sample_dv(&v, 0.2, &mut rng).unwrap()).collect();
        assert!(points_error(&w, &pts) >= 0.05);
    }

    #[test]
    fn margin_family_has_the_requested_margin() {
        let ds = gen_lsp_margin(64, 300, 0.3, 9).unwrap();
        assert_eq!(ds.len(), 300);
        assert!((ds.margin() - 0.3).abs() < 1e-12);
        assert!(ds.points().iter().all(|p| (p.x.norm() - 1.0).abs() < 1e-12));
    }
}
