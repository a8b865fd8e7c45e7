use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::report::{record, LemmaReport, TrialStatus};
use crate::linalg::{chordal_distance, sample_grassmannian, Subspace};
use crate::{Error, Result};

/// Largest ambient dimension the quadratic-cost greedy search accepts.
pub const MAX_PACKING_DIM: usize = 24;

/// Greedy search for subspaces of `Gr(k, d)` pairwise at chordal distance ≥ `radius`.
///
/// Samples `candidate_budget` uniform candidates and keeps each one that is far
/// enough from everything kept so far. Records hold the retained-set size after
/// every tenth of the budget.
pub fn greedy_packing(
    k: usize,
    d: usize,
    radius: f64,
    candidate_budget: usize,
    seed: u64,
) -> Result<(Vec<Subspace>, LemmaReport)> {
    if k == 0 || k > d || d > MAX_PACKING_DIM {
        return Err(Error::InvalidParameter(format!(
            "need 1 ≤ k ≤ d ≤ {MAX_PACKING_DIM}, got k = {k}, d = {d}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut kept: Vec<Subspace> = Vec::new();
    let mut records = Vec::new();
    let checkpoint = (candidate_budget / 10).max(1);
    for i in 0..candidate_budget {
        let cand = sample_grassmannian(k, d, &mut rng)?;
        let mut far = true;
        for s in &kept {
            if chordal_distance(s, &cand)? < radius {
                far = false;
                break;
            }
        }
        if far {
            kept.push(cand);
        }
        if (i + 1) % checkpoint == 0 || i + 1 == candidate_budget {
            records.push(record(
                records.len(),
                seed,
                TrialStatus::Pass,
                &[("candidates", (i + 1) as f64), ("retained", kept.len() as f64)],
            ));
        }
    }
    let mut r = LemmaReport::new(
        "packing",
        d,
        seed,
        &[("k", k as f64), ("radius", radius), ("candidate_budget", candidate_budget as f64)],
        records,
    );
    r.stat("retained", kept.len() as f64);
    r.stat("diameter", (k.min(d - k) as f64).sqrt());
    r.decide(true, "probe only: reports the retained-set size");
    Ok((kept, r))
}
