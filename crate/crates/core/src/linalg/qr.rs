//! Householder QR with column-norm pivoting (Businger–Golub).

use nalgebra::DMatrix;

/// Result of a rank-revealing factorization of a set of row vectors.
pub(crate) struct RankRevealingQr {
    /// Numerical rank of the input.
    pub rank: usize,
    /// `rank × d` matrix with orthonormal rows spanning the input rows.
    pub basis: DMatrix<f64>,
}

/// Factorizes the columns `rowsᵀ` and returns an orthonormal basis of their span.
///
/// The factorization stops as soon as the largest remaining column norm falls
/// below `rel_tol · |R₀₀|`; `|R₀₀|` is the largest input norm and is within a
/// factor `√n` of the largest singular value.
pub(crate) fn rank_revealing_qr(rows: &DMatrix<f64>, rel_tol: f64) -> RankRevealingQr {
    let n = rows.nrows();
    let d = rows.ncols();
    let mut a = vec![0.0; d * n];
    for j in 0..n {
        for i in 0..d {
            a[j * d + i] = rows[(j, i)];
        }
    }
    let mut norms: Vec<f64> = (0..n)
        .map(|j| a[j * d..(j + 1) * d].iter().map(|x| x * x).sum())
        .collect();
    let mut reference = norms.clone();

    let steps = d.min(n);
    let mut reflectors: Vec<(Vec<f64>, f64)> = Vec::with_capacity(steps);
    let mut r00 = 0.0;

    for k in 0..steps {
        let mut p = k;
        for j in k + 1..n {
            if norms[j] > norms[p] {
                p = j;
            }
        }
        if p != k {
            for i in 0..d {
                a.swap(k * d + i, p * d + i);
            }
            norms.swap(k, p);
            reference.swap(k, p);
        }

        let col = &a[k * d + k..(k + 1) * d];
        let alpha = col.iter().map(|x| x * x).sum::<f64>().sqrt();
        if k == 0 {
            r00 = alpha;
        }
        if r00 == 0.0 || alpha <= rel_tol * r00 {
            break;
        }

        let mut v = col.to_vec();
        let sign = if v[0] >= 0.0 { 1.0 } else { -1.0 };
        v[0] += sign * alpha;
        let vv: f64 = v.iter().map(|x| x * x).sum();
        let beta = 2.0 / vv;

        a[k * d + k] = -sign * alpha;
        for i in k + 1..d {
            a[k * d + i] = 0.0;
        }
        for j in k + 1..n {
            let cj = &mut a[j * d + k..(j + 1) * d];
            let s: f64 = v.iter().zip(cj.iter()).map(|(x, y)| x * y).sum();
            let f = beta * s;
            for (y, x) in cj.iter_mut().zip(v.iter()) {
                *y -= f * x;
            }
            let top = cj[0];
            norms[j] -= top * top;
            // Downdating loses accuracy once most of the norm is consumed.
            if norms[j] < 1e-6 * reference[j] {
                norms[j] = cj[1..].iter().map(|x| x * x).sum();
                reference[j] = norms[j];
            }
        }
        reflectors.push((v, beta));
    }

    let rank = reflectors.len();
    // Q's leading columns: apply H₀⋯H_{r−1} to [I_r; 0].
    let mut q = vec![0.0; d * rank];
    for c in 0..rank {
        q[c * d + c] = 1.0;
    }
    for (k, (v, beta)) in reflectors.iter().enumerate().rev() {
        for c in 0..rank {
            let qc = &mut q[c * d + k..(c + 1) * d];
            let s: f64 = v.iter().zip(qc.iter()).map(|(x, y)| x * y).sum();
            if s != 0.0 {
                let f = beta * s;
                for (y, x) in qc.iter_mut().zip(v.iter()) {
                    *y -= f * x;
                }
            }
        }
    }
    let basis = DMatrix::from_fn(rank, d, |r, i| q[r * d + i]);
    RankRevealingQr { rank, basis }
}
