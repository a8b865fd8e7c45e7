use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use super::subspace::{complement, Subspace};
use super::canonical_sign;
use crate::{Error, Result};

/// Singular values `σ₁ ≥ … ≥ σ_d ≥ 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    values: Vec<f64>,
}

impl Spectrum {
    /// Sorts the values nonincreasing; rejects negative or non-finite entries.
    pub fn new(mut values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::InvalidParameter("singular values must be finite and nonnegative".into()));
        }
        values.sort_by(|a, b| b.total_cmp(a));
        Ok(Spectrum { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn max(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    pub fn min(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }

    /// `σ_i` with the 1-based index used in random-matrix statements.
    pub fn nth(&self, i: usize) -> Option<f64> {
        i.checked_sub(1).and_then(|j| self.values.get(j).copied())
    }

    pub fn sum_of_squares(&self) -> f64 {
        self.values.iter().map(|s| s * s).sum()
    }
}

/// The `d` singular values of an `n × d` matrix, i.e. the square roots of the
/// eigenvalues of `MᵀM` (zero-padded when `n < d`).
pub fn singular_values(m: &DMatrix<f64>) -> Spectrum {
    let d = m.ncols();
    let mut values: Vec<f64> = if m.nrows() == 0 || d == 0 {
        Vec::new()
    } else {
        m.clone().svd(false, false).singular_values.iter().copied().collect()
    };
    values.resize(d, 0.0);
    Spectrum::new(values).expect("SVD yields nonnegative values")
}

/// Singular values together with an orthonormal basis of right singular vectors.
///
/// Row `i` of the returned `d × d` matrix pairs with `σ_{i+1}`; directions in
/// the null space (when `n < d`) complete the basis.
pub fn singular_decomposition(m: &DMatrix<f64>) -> (Spectrum, DMatrix<f64>) {
    let d = m.ncols();
    let svd = m.clone().svd(false, true);
    let vt = svd.v_t.expect("requested right singular vectors");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let mut values: Vec<f64> = order.iter().map(|&i| svd.singular_values[i]).collect();
    let mut vectors = DMatrix::zeros(d, d);
    for (r, &i) in order.iter().enumerate() {
        vectors.set_row(r, &vt.row(i));
    }
    let filled = order.len();
    if filled < d {
        let span = Subspace::from_basis_unchecked(d, vectors.rows(0, filled).into_owned());
        let rest = complement(&span);
        vectors.rows_mut(filled, d - filled).copy_from(rest.basis());
        values.resize(d, 0.0);
    }
    (Spectrum { values }, vectors)
}

/// Smallest eigenvalue of a certified symmetric matrix and a unit eigenvector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigCertificate {
    pub lambda_min: f64,
    pub witness: DVector<f64>,
}

/// Smallest eigenpair of a symmetric matrix (eigenvector sign-normalized).
pub fn symmetric_min_eigenpair(m: &DMatrix<f64>) -> (f64, DVector<f64>) {
    let eig = SymmetricEigen::new(m.clone());
    let i = eig.eigenvalues.imin();
    let mut w: DVector<f64> = eig.eigenvectors.column(i).into_owned();
    w /= w.norm();
    canonical_sign(&mut w);
    (eig.eigenvalues[i], w)
}

/// `λ_min(Σᵢ P_{Sᵢ})` with its eigenvector.
///
/// Since `min_{‖v‖=1} Σᵢ ‖Proj_{Sᵢ} v‖² = λ_min`, the certificate shows that
/// every unit vector has `maxᵢ ‖Proj_{Sᵢ} v‖ ≥ √(λ_min / count)`.
pub fn min_eig_projector_sum(subspaces: &[Subspace]) -> Result<EigCertificate> {
    let first = subspaces.first().ok_or(Error::EmptyList)?;
    let d = first.ambient_dim();
    let mut sum = DMatrix::zeros(d, d);
    for s in subspaces {
        if s.ambient_dim() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: s.ambient_dim(),
            });
        }
        sum += s.projector();
    }
    let (lambda, witness) = symmetric_min_eigenpair(&sum);
    Ok(EigCertificate {
        lambda_min: lambda.max(0.0),
        witness,
    })
}
