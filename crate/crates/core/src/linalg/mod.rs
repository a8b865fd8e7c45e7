//! Dense linear-algebra substrate: subspaces, projections, principal angles,
//! kernel vectors, spectra and projector-sum certificates.
//!
//! All solves are dense `O(d³)`; the intended range is `d ≲ 2048`.

mod qr;
mod sampling;
mod spectrum;
mod subspace;

use nalgebra::DVector;

pub use sampling::{
    gaussian_matrix, gaussian_vector, sample_grassmannian, sample_uniform_sphere, sample_uniform_subsphere,
};
pub use spectrum::{
    min_eig_projector_sum, singular_decomposition, singular_values, symmetric_min_eigenpair, EigCertificate,
    Spectrum,
};
pub use subspace::{
    chordal_distance, complement, direct_sum, kernel_vector, kernel_vector_of_rows, orthonormalize,
    orthonormalize_vectors, principal_angles, project, stack_rows, Subspace,
};

/// Relative tolerance for numerical rank decisions.
pub const RANK_TOL: f64 = 1e-10;

/// Coordinates below this magnitude are skipped by the sign convention.
pub const SIGN_THRESHOLD: f64 = 1e-12;

/// Flips `v` so its first coordinate above [`SIGN_THRESHOLD`] in magnitude is positive.
pub fn canonical_sign(v: &mut DVector<f64>) {
    if let Some(x) = v.iter().find(|x| x.abs() > SIGN_THRESHOLD) {
        if *x < 0.0 {
            v.neg_mut();
        }
    }
}

/// `e_i` in ℝ^d (0-based).
pub fn unit_vector(d: usize, i: usize) -> DVector<f64> {
    let mut v = DVector::zeros(d);
    v[i] = 1.0;
    v
}
