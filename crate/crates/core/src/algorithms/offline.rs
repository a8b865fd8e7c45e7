use nalgebra::{DMatrix, DVector};

use crate::instances::Equation;
use crate::linalg::{kernel_vector_of_rows, symmetric_min_eigenpair};
use crate::streaming::{BitReader, BitState, OnePassAlgorithm, SharedRandomness};
use crate::{Error, Result};

const COUNT_BITS: usize = 32;

fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

fn bump_count(state: &mut BitState) -> Result<u64> {
    let n = state.read_bits(0, COUNT_BITS)?;
    if n + 1 >= 1 << COUNT_BITS {
        return Err(Error::InvalidParameter("stream longer than 2³² − 1 samples".into()));
    }
    state.write_bits(0, COUNT_BITS, n + 1)?;
    Ok(n)
}

/// Stores every vector verbatim and solves the ANV problem at the end.
///
/// Layout: a 32-bit count followed by the stored vectors as raw `f64`.
/// With exactly `d − 1` vectors the output is their kernel vector; otherwise it
/// is the bottom eigenvector of `Σ vᵢvᵢᵀ`, which minimizes `Σ (wᵀvᵢ)²`.
#[derive(Debug, Clone)]
pub struct OfflineKernelSolver {
    d: usize,
}

impl OfflineKernelSolver {
    pub fn new(d: usize) -> Self {
        OfflineKernelSolver { d }
    }

    /// Bits needed to store `n` vectors.
    pub fn required_bits(&self, n: usize) -> usize {
        COUNT_BITS + 64 * self.d * n
    }
}

impl OnePassAlgorithm for OfflineKernelSolver {
    type Sample = DVector<f64>;
    type Output = DVector<f64>;

    fn update(&self, _: usize, v: &DVector<f64>, mut state: BitState, _: &SharedRandomness) -> Result<BitState> {
        check_len(self.d, v.len())?;
        let n = bump_count(&mut state)? as usize;
        state.writer_at(self.required_bits(n)).write_f64s(v.iter().copied())?;
        Ok(state)
    }

    fn finalize(&self, state: &BitState, _: &SharedRandomness) -> Result<DVector<f64>> {
        let d = self.d;
        let mut r = state.reader();
        let n = r.read_bits(COUNT_BITS)? as usize;
        let mut rows = DMatrix::zeros(n, d);
        for i in 0..n {
            for j in 0..d {
                rows[(i, j)] = r.read_f64()?;
            }
        }
        if n + 1 == d {
            match kernel_vector_of_rows(&rows) {
                Ok(w) => return Ok(w),
                Err(Error::RankDeficient { .. }) => {}
                Err(e) => return Err(e),
            }
        }
        Ok(symmetric_min_eigenpair(&(rows.transpose() * &rows)).1)
    }
}

/// Least-squares solver holding a streaming QR factorization of `[A | b]`.
///
/// Layout: 32-bit count, the upper triangle of `R` row by row, `z = Qᵀb`, and
/// the residual sum of squares, all as raw `f64`: `32 + 64·(d(d+1)/2 + d + 1)`
/// bits. Each equation is folded in with Givens rotations, so the state is
/// equivalent to storing `(A, b)` for every least-squares purpose. Finalizing
/// returns the minimum-norm least-squares solution, scaled back to the unit
/// ball when longer than 1.
#[derive(Debug, Clone)]
pub struct OfflineLstsqSolver {
    d: usize,
}

/// Singular values of `R` below this fraction of the largest are treated as zero.
const PINV_RTOL: f64 = 1e-12;

struct Factor {
    count: u64,
    r: DMatrix<f64>,
    z: DVector<f64>,
    rss: f64,
}

impl OfflineLstsqSolver {
    pub fn new(d: usize) -> Self {
        OfflineLstsqSolver { d }
    }

    pub fn required_bits(&self) -> usize {
        let d = self.d;
        COUNT_BITS + 64 * (d * (d + 1) / 2 + d + 1)
    }

    fn read(&self, r: &mut BitReader<'_>) -> Result<Factor> {
        let d = self.d;
        let count = r.read_bits(COUNT_BITS)?;
        let mut rm = DMatrix::zeros(d, d);
        for i in 0..d {
            for j in i..d {
                rm[(i, j)] = r.read_f64()?;
            }
        }
        let z = DVector::from_vec(r.read_f64s(d)?);
        let rss = r.read_f64()?;
        Ok(Factor { count, r: rm, z, rss })
    }

    fn write(&self, f: &Factor, state: &mut BitState) -> Result<()> {
        let d = self.d;
        let mut w = state.writer();
        w.write_bits(COUNT_BITS, f.count)?;
        for i in 0..d {
            w.write_f64s((i..d).map(|j| f.r[(i, j)]))?;
        }
        w.write_f64s(f.z.iter().copied())?;
        w.write_f64(f.rss)
    }
}

impl OnePassAlgorithm for OfflineLstsqSolver {
    type Sample = Equation;
    type Output = DVector<f64>;

    fn update(&self, _: usize, eq: &Equation, mut state: BitState, _: &SharedRandomness) -> Result<BitState> {
        let d = self.d;
        check_len(d, eq.row.len())?;
        if state.capacity_bits() < self.required_bits() {
            return Err(Error::BudgetViolation {
                capacity_bits: state.capacity_bits(),
                required_bits: self.required_bits(),
            });
        }
        let mut f = self.read(&mut state.reader())?;
        if f.count + 1 >= 1 << COUNT_BITS {
            return Err(Error::InvalidParameter("stream longer than 2³² − 1 samples".into()));
        }
        let mut row = eq.row.clone();
        let mut t = eq.target;
        for k in 0..d {
            let (a, b) = (f.r[(k, k)], row[k]);
            if b == 0.0 {
                continue;
            }
            let h = a.hypot(b);
            let (c, s) = (a / h, b / h);
            for j in k..d {
                let (rj, xj) = (f.r[(k, j)], row[j]);
                f.r[(k, j)] = c * rj + s * xj;
                row[j] = -s * rj + c * xj;
            }
            let zk = f.z[k];
            f.z[k] = c * zk + s * t;
            t = -s * zk + c * t;
        }
        f.rss += t * t;
        f.count += 1;
        self.write(&f, &mut state)?;
        Ok(state)
    }

    fn finalize(&self, state: &BitState, _: &SharedRandomness) -> Result<DVector<f64>> {
        if state.capacity_bits() < self.required_bits() {
            return Err(Error::BudgetViolation {
                capacity_bits: state.capacity_bits(),
                required_bits: self.required_bits(),
            });
        }
        let f = self.read(&mut state.reader())?;
        let svd = f.r.svd(true, true);
        let smax = svd.singular_values.max();
        let w = if smax == 0.0 {
            DVector::zeros(self.d)
        } else {
            svd.solve(&f.z, PINV_RTOL * smax).map_err(|e| Error::InvalidParameter(e.to_string()))?
        };
        let n = w.norm();
        Ok(if n > 1.0 { w / n } else { w })
    }
}
