use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::qr::rank_revealing_qr;
use super::{canonical_sign, RANK_TOL};
use crate::{Error, Result};

/// Orthonormality tolerance checked whenever a basis enters from outside.
const ORTHONORMAL_TOL: f64 = 1e-10;

/// A linear subspace of ℝ^d carried as a `k × d` matrix with orthonormal rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SubspaceRecord", into = "SubspaceRecord")]
pub struct Subspace {
    ambient_dim: usize,
    basis: DMatrix<f64>,
}

/// On-disk layout: `{ambient_dim, dim, basis}` with the basis flattened row-major.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SubspaceRecord {
    ambient_dim: usize,
    dim: usize,
    basis: Vec<f64>,
}

impl From<Subspace> for SubspaceRecord {
    fn from(s: Subspace) -> Self {
        let mut basis = Vec::with_capacity(s.dim() * s.ambient_dim);
        for r in 0..s.dim() {
            basis.extend(s.basis.row(r).iter().copied());
        }
        SubspaceRecord {
            ambient_dim: s.ambient_dim,
            dim: s.dim(),
            basis,
        }
    }
}

impl TryFrom<SubspaceRecord> for Subspace {
    type Error = Error;

    fn try_from(r: SubspaceRecord) -> Result<Self> {
        if r.basis.len() != r.dim * r.ambient_dim {
            return Err(Error::DimensionMismatch {
                expected: r.dim * r.ambient_dim,
                found: r.basis.len(),
            });
        }
        Subspace::from_orthonormal_rows(DMatrix::from_row_slice(r.dim, r.ambient_dim, &r.basis))
    }
}

impl Subspace {
    /// Wraps a basis that is already orthonormal (checked to 1e−10).
    pub fn from_orthonormal_rows(basis: DMatrix<f64>) -> Result<Self> {
        let ambient_dim = basis.ncols();
        if ambient_dim == 0 {
            return Err(Error::InvalidParameter("ambient dimension must be positive".into()));
        }
        if basis.nrows() > ambient_dim {
            return Err(Error::InvalidParameter(format!(
                "{} basis rows exceed ambient dimension {ambient_dim}",
                basis.nrows()
            )));
        }
        let k = basis.nrows();
        let residual = (&basis * basis.transpose() - DMatrix::<f64>::identity(k, k)).amax();
        if residual > ORTHONORMAL_TOL {
            return Err(Error::InvalidParameter(format!(
                "basis rows are not orthonormal (residual {residual:.3e})"
            )));
        }
        Ok(Subspace { ambient_dim, basis })
    }

    pub(crate) fn from_basis_unchecked(ambient_dim: usize, basis: DMatrix<f64>) -> Self {
        debug_assert_eq!(basis.ncols(), ambient_dim);
        Subspace { ambient_dim, basis }
    }

    /// The whole space ℝ^d with the standard basis.
    pub fn full(d: usize) -> Self {
        Subspace::from_basis_unchecked(d, DMatrix::identity(d, d))
    }

    /// The trivial subspace {0} of ℝ^d.
    pub fn zero(d: usize) -> Self {
        Subspace::from_basis_unchecked(d, DMatrix::zeros(0, d))
    }

    /// Span of the listed standard basis vectors (0-based coordinates).
    pub fn coordinate(d: usize, coords: &[usize]) -> Result<Self> {
        let mut rows = DMatrix::zeros(coords.len(), d);
        for (r, &c) in coords.iter().enumerate() {
            if c >= d {
                return Err(Error::InvalidParameter(format!("coordinate {c} out of range for d = {d}")));
            }
            rows[(r, c)] = 1.0;
        }
        Subspace::from_orthonormal_rows(rows)
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.basis.nrows()
    }

    /// Rows form an orthonormal basis.
    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    pub fn basis_vector(&self, i: usize) -> DVector<f64> {
        self.basis.row(i).transpose()
    }

    /// Orthogonal projection matrix `BᵀB`.
    pub fn projector(&self) -> DMatrix<f64> {
        self.basis.transpose() * &self.basis
    }

    fn check_vector(&self, v: &DVector<f64>) -> Result<()> {
        if v.len() != self.ambient_dim {
            return Err(Error::DimensionMismatch {
                expected: self.ambient_dim,
                found: v.len(),
            });
        }
        Ok(())
    }

    /// Coordinates of `v` in this basis, `B·v`.
    pub fn coordinates(&self, v: &DVector<f64>) -> Result<DVector<f64>> {
        self.check_vector(v)?;
        Ok(&self.basis * v)
    }

    /// Lifts basis coordinates back into ℝ^d, `Bᵀ·c`.
    pub fn lift(&self, c: &DVector<f64>) -> Result<DVector<f64>> {
        if c.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: c.len(),
            });
        }
        Ok(self.basis.tr_mul(c))
    }
}

/// Orthonormal basis of the span of `rows` (one vector per row).
///
/// The dimension is the numerical rank at relative tolerance 1e−10.
pub fn orthonormalize(rows: &DMatrix<f64>) -> Result<Subspace> {
    let d = rows.ncols();
    if d == 0 {
        return Err(Error::InvalidParameter("vectors must have positive length".into()));
    }
    let f = rank_revealing_qr(rows, RANK_TOL);
    if f.rank == 0 {
        return Err(Error::DegenerateInput);
    }
    Ok(Subspace::from_basis_unchecked(d, f.basis))
}

/// [`orthonormalize`] for a list of vectors.
pub fn orthonormalize_vectors(vectors: &[DVector<f64>]) -> Result<Subspace> {
    orthonormalize(&stack_rows(vectors)?)
}

/// Stacks equal-length vectors as the rows of a matrix.
pub fn stack_rows(vectors: &[DVector<f64>]) -> Result<DMatrix<f64>> {
    let first = vectors.first().ok_or(Error::EmptyList)?;
    let d = first.len();
    let mut m = DMatrix::zeros(vectors.len(), d);
    for (r, v) in vectors.iter().enumerate() {
        if v.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: v.len(),
            });
        }
        m.set_row(r, &v.transpose());
    }
    Ok(m)
}

/// `Proj_S(v) = Bᵀ(B v)`.
pub fn project(s: &Subspace, v: &DVector<f64>) -> Result<DVector<f64>> {
    let c = s.coordinates(v)?;
    Ok(s.basis.tr_mul(&c))
}

/// The orthogonal complement S⊥, of dimension d − k.
pub fn complement(s: &Subspace) -> Subspace {
    let d = s.ambient_dim;
    let k = s.dim();
    if k == 0 {
        return Subspace::full(d);
    }
    if k == d {
        return Subspace::zero(d);
    }
    // Pivoted Gram–Schmidt over the columns of I − BᵀB.
    let b = &s.basis;
    let mut residual = DMatrix::<f64>::identity(d, d) - b.tr_mul(b);
    let mut accepted = DMatrix::<f64>::zeros(d - k, d);
    for a in 0..d - k {
        let (mut best, mut best_norm) = (0, -1.0);
        for j in 0..d {
            let n = residual.column(j).norm_squared();
            if n > best_norm {
                best = j;
                best_norm = n;
            }
        }
        let mut q: DVector<f64> = residual.column(best).into_owned();
        for _ in 0..2 {
            let cb = b * &q;
            q -= b.tr_mul(&cb);
            if a > 0 {
                let prev = accepted.rows(0, a);
                let ca = prev * &q;
                q -= prev.tr_mul(&ca);
            }
            q /= q.norm();
        }
        let qt_r = q.tr_mul(&residual);
        residual -= &q * qt_r;
        accepted.set_row(a, &q.transpose());
    }
    Subspace::from_basis_unchecked(d, accepted)
}

/// `U ⊕ V`; fails with `OverlapDetected` when the spans intersect numerically.
pub fn direct_sum(u: &Subspace, v: &Subspace) -> Result<Subspace> {
    if u.ambient_dim != v.ambient_dim {
        return Err(Error::DimensionMismatch {
            expected: u.ambient_dim,
            found: v.ambient_dim,
        });
    }
    let d = u.ambient_dim;
    let expected = u.dim() + v.dim();
    if expected == 0 {
        return Ok(Subspace::zero(d));
    }
    let mut rows = DMatrix::zeros(expected, d);
    rows.rows_mut(0, u.dim()).copy_from(&u.basis);
    rows.rows_mut(u.dim(), v.dim()).copy_from(&v.basis);
    let f = rank_revealing_qr(&rows, RANK_TOL);
    if f.rank < expected {
        return Err(Error::OverlapDetected {
            rank: f.rank,
            expected,
        });
    }
    Ok(Subspace::from_basis_unchecked(d, f.basis))
}

/// The unit vector orthogonal to d − 1 linearly independent vectors in ℝ^d.
///
/// The sign is fixed so that the first coordinate with magnitude above 1e−12
/// is positive.
pub fn kernel_vector(vectors: &[DVector<f64>]) -> Result<DVector<f64>> {
    let rows = stack_rows(vectors)?;
    kernel_vector_of_rows(&rows)
}

/// [`kernel_vector`] for vectors given as matrix rows.
pub fn kernel_vector_of_rows(rows: &DMatrix<f64>) -> Result<DVector<f64>> {
    let d = rows.ncols();
    if d < 2 || rows.nrows() != d - 1 {
        return Err(Error::DimensionMismatch {
            expected: d.saturating_sub(1),
            found: rows.nrows(),
        });
    }
    let f = rank_revealing_qr(rows, RANK_TOL);
    if f.rank < d - 1 {
        return Err(Error::RankDeficient {
            rank: f.rank,
            expected: d - 1,
        });
    }
    let span = Subspace::from_basis_unchecked(d, f.basis);
    let mut w = complement(&span).basis_vector(0);
    canonical_sign(&mut w);
    Ok(w)
}

fn check_same_shape(u: &Subspace, v: &Subspace) -> Result<()> {
    if u.ambient_dim != v.ambient_dim {
        return Err(Error::DimensionMismatch {
            expected: u.ambient_dim,
            found: v.ambient_dim,
        });
    }
    if u.dim() != v.dim() {
        return Err(Error::DimensionMismatch {
            expected: u.dim(),
            found: v.dim(),
        });
    }
    Ok(())
}

/// Principal angles between equal-dimensional subspaces, largest first.
///
/// Cosines are the singular values of `B_U·B_Vᵀ`, clamped into [0, 1] and
/// sorted nondecreasing, so the result reads θ₁ ≥ θ₂ ≥ … ≥ θ_k.
pub fn principal_angles(u: &Subspace, v: &Subspace) -> Result<Vec<f64>> {
    check_same_shape(u, v)?;
    if u.dim() == 0 {
        return Ok(Vec::new());
    }
    let cross = &u.basis * v.basis.transpose();
    let mut cosines: Vec<f64> = cross
        .svd(false, false)
        .singular_values
        .iter()
        .map(|c| c.clamp(0.0, 1.0))
        .collect();
    cosines.sort_by(f64::total_cmp);
    Ok(cosines.into_iter().map(f64::acos).collect())
}

/// Chordal distance `√(Σ sin²θᵢ)`.
///
/// Evaluated as `‖B_U − (B_U B_Vᵀ) B_V‖_F`, whose singular values are the
/// sines of the principal angles; this keeps full relative accuracy for
/// nearly identical subspaces, where `1 − cos²` would cancel.
pub fn chordal_distance(u: &Subspace, v: &Subspace) -> Result<f64> {
    check_same_shape(u, v)?;
    let cross = &u.basis * v.basis.transpose();
    let residual = &u.basis - cross * &v.basis;
    Ok(residual.norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::sampling::sample_grassmannian;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::FRAC_PI_2;

    fn e(d: usize, i: usize) -> DVector<f64> {
        let mut v = DVector::zeros(d);
        v[i] = 1.0;
        v
    }

    fn spans_equal(a: &Subspace, b: &Subspace) -> bool {
        a.dim() == b.dim() && chordal_distance(a, b).unwrap() < 1e-8
    }

    #[test]
    fn orthonormalize_keeps_orthonormal_input() {
        let s = orthonormalize_vectors(&[e(3, 0), e(3, 1)]).unwrap();
        assert_eq!(s.dim(), 2);
        assert!(spans_equal(&s, &Subspace::coordinate(3, &[0, 1]).unwrap()));
    }

    #[test]
    fn orthonormalize_drops_dependent_vectors() {
        let s = orthonormalize_vectors(&[e(3, 0), 2.0 * e(3, 0)]).unwrap();
        assert_eq!(s.dim(), 1);
        assert!(spans_equal(&s, &Subspace::coordinate(3, &[0]).unwrap()));
    }

    #[test]
    fn orthonormalize_rejects_zero_input() {
        let z = DVector::zeros(4);
        assert_eq!(orthonormalize_vectors(&[z.clone(), z]), Err(Error::DegenerateInput));
    }

    #[test]
    fn gaussian_rows_have_full_rank() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let g = crate::linalg::gaussian_matrix(5, 10, 1.0, &mut rng);
        let s = orthonormalize(&g).unwrap();
        // Independent rank count from the SVD.
        let svd_rank = g.clone().svd(false, false).singular_values.iter().filter(|&&x| x > 1e-10).count();
        assert_eq!(s.dim(), svd_rank);
        assert_eq!(s.dim(), 5);
        // Same span: every input row is reproduced by its projection.
        for r in 0..5 {
            let row = g.row(r).transpose();
            assert!((project(&s, &row).unwrap() - &row).norm() < 1e-12 * row.norm());
        }
    }

    #[test]
    fn project_examples() {
        let s = Subspace::coordinate(2, &[0]).unwrap();
        let p = project(&s, &DVector::from_vec(vec![3.0, 4.0])).unwrap();
        assert_eq!(p, DVector::from_vec(vec![3.0, 0.0]));
        let v = DVector::from_vec(vec![1.5, -2.0, 0.25]);
        assert!((project(&Subspace::full(3), &v).unwrap() - &v).norm() < 1e-15);
        assert!(matches!(project(&s, &v), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn complement_examples() {
        let c = complement(&Subspace::coordinate(2, &[0]).unwrap());
        assert!(spans_equal(&c, &Subspace::coordinate(2, &[1]).unwrap()));

        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let s = sample_grassmannian(3, 8, &mut rng).unwrap();
        let c = complement(&s);
        assert_eq!(c.dim(), 5);
        assert!((s.basis() * c.basis().transpose()).amax() < 1e-10);
        assert!(spans_equal(&complement(&c), &s));
        assert_eq!(complement(&Subspace::full(4)).dim(), 0);
        assert_eq!(complement(&Subspace::zero(4)).dim(), 4);
    }

    #[test]
    fn direct_sum_examples() {
        let a = Subspace::coordinate(3, &[0]).unwrap();
        let b = Subspace::coordinate(3, &[1]).unwrap();
        let ab = direct_sum(&a, &b).unwrap();
        assert!(spans_equal(&ab, &Subspace::coordinate(3, &[0, 1]).unwrap()));
        assert!(matches!(direct_sum(&a, &a), Err(Error::OverlapDetected { rank: 1, expected: 2 })));

        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let d = 12;
        let v = sample_grassmannian(d / 2, d, &mut rng).unwrap();
        let u = sample_grassmannian(d / 2 - 1, d, &mut rng).unwrap();
        assert_eq!(direct_sum(&v, &u).unwrap().dim(), d - 1);
    }

    #[test]
    fn kernel_vector_examples() {
        assert_eq!(kernel_vector(&[e(3, 0), e(3, 1)]).unwrap(), e(3, 2));
        assert_eq!(kernel_vector(&[e(3, 1), e(3, 2)]).unwrap(), e(3, 0));
        // Sign convention: first nonzero coordinate positive.
        let w = kernel_vector(&[DVector::from_vec(vec![1.0, 1.0])]).unwrap();
        assert!(w[0] > 0.0 && (w[0] + w[1]).abs() < 1e-15);
        assert!(matches!(
            kernel_vector(&[e(3, 0), e(3, 0)]),
            Err(Error::RankDeficient { rank: 1, expected: 2 })
        ));
        assert!(matches!(kernel_vector(&[e(3, 0)]), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn kernel_vector_matches_svd_null_space() {
        let mut rng = ChaCha8Rng::seed_from_u64(20);
        let d = 20;
        let g = crate::linalg::gaussian_matrix(d - 1, d, 1.0, &mut rng);
        let w = kernel_vector_of_rows(&g).unwrap();
        assert!((w.norm() - 1.0).abs() < 1e-10);
        assert!((&g * &w).amax() < 1e-10);
        // Oracle: right singular vector of the zero singular value of [G; 0].
        let mut square = DMatrix::zeros(d, d);
        square.rows_mut(0, d - 1).copy_from(&g);
        let svd = square.svd(false, true);
        let vt = svd.v_t.unwrap();
        let imin = svd.singular_values.imin();
        let null = vt.row(imin).transpose();
        assert!(1.0 - w.dot(&null).abs() < 1e-12);
    }

    #[test]
    fn principal_angle_examples() {
        let a = Subspace::coordinate(2, &[0]).unwrap();
        let b = Subspace::coordinate(2, &[1]).unwrap();
        assert_eq!(principal_angles(&a, &a).unwrap(), vec![0.0]);
        assert!((principal_angles(&a, &b).unwrap()[0] - FRAC_PI_2).abs() < 1e-15);

        let alpha: f64 = 0.3;
        let rotated = orthonormalize_vectors(&[DVector::from_vec(vec![alpha.cos(), alpha.sin()])]).unwrap();
        // Oracle: arccos of the direct inner product.
        let oracle = (a.basis_vector(0).dot(&rotated.basis_vector(0))).abs().acos();
        assert!((principal_angles(&a, &rotated).unwrap()[0] - oracle).abs() < 1e-12);
        assert!((oracle - alpha).abs() < 1e-12);

        let c = Subspace::coordinate(3, &[0, 1]).unwrap();
        assert!(matches!(principal_angles(&a, &c), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn principal_angles_are_sorted_largest_first() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let u = sample_grassmannian(4, 9, &mut rng).unwrap();
        let v = sample_grassmannian(4, 9, &mut rng).unwrap();
        let angles = principal_angles(&u, &v).unwrap();
        assert!(angles.windows(2).all(|w| w[0] >= w[1]));
        assert!(angles.iter().all(|&t| (0.0..=FRAC_PI_2).contains(&t)));
        let from_angles = angles.iter().map(|t| t.sin().powi(2)).sum::<f64>().sqrt();
        assert!((from_angles - chordal_distance(&u, &v).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn chordal_distance_examples() {
        let a = Subspace::coordinate(3, &[0]).unwrap();
        let b = Subspace::coordinate(3, &[1]).unwrap();
        assert_eq!(chordal_distance(&a, &a).unwrap(), 0.0);
        assert!((chordal_distance(&a, &b).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn chordal_distance_survives_complement() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let d = 20;
        for _ in 0..10 {
            let u = sample_grassmannian(d / 2, d, &mut rng).unwrap();
            let v = sample_grassmannian(d / 2, d, &mut rng).unwrap();
            let direct = chordal_distance(&u, &v).unwrap();
            let dual = chordal_distance(&complement(&u), &complement(&v)).unwrap();
            assert!((direct - dual).abs() < 1e-8);
        }
    }

    #[test]
    fn json_layout_is_row_major() {
        let s = Subspace::coordinate(3, &[2]).unwrap();
        let text = crate::fmt::to_json(&s).unwrap();
        assert_eq!(
            text,
            "{\"ambient_dim\":3,\"dim\":1,\"basis\":[0.0000000000000000e0,0.0000000000000000e0,1.0000000000000000e0]}"
        );
        let back: Subspace = serde_json::from_str(&text).unwrap();
        assert_eq!(back, s);
        let bad = "{\"ambient_dim\":2,\"dim\":1,\"basis\":[1.0,1.0]}";
        assert!(serde_json::from_str::<Subspace>(bad).is_err());
    }
}
