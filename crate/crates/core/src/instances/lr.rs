use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::anv::{AnvInstance, AnvVariant};
use crate::linalg::unit_vector;
use crate::{Error, Result};

/// One streamed regression equation `rowᵀw = target`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Equation {
    pub row: DVector<f64>,
    pub target: f64,
}

/// A consistent system `Aw* = b` with `‖Aᵢ‖ ≤ 1`, `‖b‖ ≤ 1`, `‖w*‖ ≤ 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct LrInstance {
    a: DMatrix<f64>,
    b: DVector<f64>,
    witness: DVector<f64>,
    params: BTreeMap<String, f64>,
    seed: Option<u64>,
}

const NORM_SLACK: f64 = 1e-12;

impl LrInstance {
    pub fn new(
        a: DMatrix<f64>,
        b: DVector<f64>,
        witness: DVector<f64>,
        params: BTreeMap<String, f64>,
        seed: Option<u64>,
    ) -> Result<Self> {
        if a.nrows() != b.len() {
            return Err(Error::DimensionMismatch {
                expected: a.nrows(),
                found: b.len(),
            });
        }
        if a.ncols() != witness.len() {
            return Err(Error::DimensionMismatch {
                expected: a.ncols(),
                found: witness.len(),
            });
        }
        if let Some(r) = a.row_iter().map(|r| r.norm()).find(|&n| n > 1.0 + NORM_SLACK) {
            return Err(Error::InvalidParameter(format!("row norm {r} exceeds 1")));
        }
        for (name, n) in [("b", b.norm()), ("witness", witness.norm())] {
            if n > 1.0 + NORM_SLACK {
                return Err(Error::InvalidParameter(format!("‖{name}‖ = {n} exceeds 1")));
            }
        }
        let residual = (&a * &witness - &b).norm();
        if residual > 1e-10 {
            return Err(Error::InvalidParameter(format!("witness residual {residual:e} exceeds 1e-10")));
        }
        Ok(LrInstance {
            a,
            b,
            witness,
            params,
            seed,
        })
    }

    pub fn dim(&self) -> usize {
        self.a.ncols()
    }

    pub fn a(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn b(&self) -> &DVector<f64> {
        &self.b
    }

    pub fn witness(&self) -> &DVector<f64> {
        &self.witness
    }

    pub fn params(&self) -> &BTreeMap<String, f64> {
        &self.params
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    /// Row position of the inserted `e₁ᵀw = c_f` equation, when generated by reduction.
    pub fn inserted_at(&self) -> Option<usize> {
        self.params.get("inserted_at").map(|&p| p as usize)
    }

    /// The rows of `(A, b)` in stream order.
    pub fn equations(&self) -> Vec<Equation> {
        self.a
            .row_iter()
            .zip(self.b.iter())
            .map(|(r, &t)| Equation {
                row: r.transpose(),
                target: t,
            })
            .collect()
    }
}

/// Index in `0..d` selected by a uniform `u ∈ [0, 1)`.
pub fn insertion_position(d: usize, u: f64) -> usize {
    ((u * d as f64) as usize).min(d.saturating_sub(1))
}

/// Regression instance induced by a conditioned ANV instance: `e₁ᵀw = c_f` is inserted
/// among the `θᵢ ᵀw = 0` rows at a uniform position, and `w* = c_f·ker / (e₁ᵀker)`.
pub fn gen_lr_from_anv(inst: &AnvInstance, seed: u64) -> Result<LrInstance> {
    let AnvVariant::SphereConditioned { c_f } = inst.variant() else {
        return Err(Error::InvalidParameter("the regression reduction needs a conditioned instance".into()));
    };
    let d = inst.dim();
    let w = inst.witness();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pos = rng.random_range(0..d);
    let mut a = DMatrix::zeros(d, d);
    let mut b = DVector::zeros(d);
    let e1 = unit_vector(d, 0);
    let mut thetas = inst.vectors().iter();
    for r in 0..d {
        if r == pos {
            a.set_row(r, &e1.transpose());
            b[r] = c_f;
        } else {
            a.set_row(r, &thetas.next().expect("d − 1 vectors").transpose());
        }
    }
    let witness = w * (c_f / w[0]);
    let params = BTreeMap::from([("c_f".to_string(), c_f), ("inserted_at".to_string(), pos as f64)]);
    LrInstance::new(a, b, witness, params, Some(seed))
}

/// `‖Aw − b‖²`.
pub fn lr_loss(inst: &LrInstance, w: &DVector<f64>) -> Result<f64> {
    if w.len() != inst.dim() {
        return Err(Error::DimensionMismatch {
            expected: inst.dim(),
            found: w.len(),
        });
    }
    Ok((&inst.a * w - &inst.b).norm_squared())
}
