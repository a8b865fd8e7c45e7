use rand::seq::SliceRandom;

use super::bits::BitState;
use super::randomness::SharedRandomness;
use crate::{Error, Result};

/// A one-pass algorithm `sᵢ = fᵢ(zᵢ, sᵢ₋₁)` with output `o(s_m, R)`.
///
/// Implementations hold configuration only. The runner calls every method on a
/// fresh clone of the value it was given, so anything an implementation tries
/// to remember outside the returned [`BitState`] is lost between samples.
pub trait OnePassAlgorithm: Clone {
    type Sample;
    type Output;

    /// Maps `(step, zᵢ, sᵢ₋₁)` to `sᵢ`. `step` is 0-based.
    fn update(
        &self,
        step: usize,
        sample: &Self::Sample,
        state: BitState,
        rand: &SharedRandomness,
    ) -> Result<BitState>;

    fn finalize(&self, state: &BitState, rand: &SharedRandomness) -> Result<Self::Output>;
}

/// Rebuilds `next` from its raw bytes, as if it had been written to memory and read back.
fn launder(next: BitState, budget_bits: usize) -> Result<BitState> {
    if next.capacity_bits() != budget_bits {
        return Err(Error::BudgetViolation {
            capacity_bits: budget_bits,
            required_bits: next.capacity_bits(),
        });
    }
    BitState::from_payload(budget_bits, next.into_payload())
}

/// Feeds `samples` as steps `first_step, first_step + 1, …` starting from `state`.
pub fn advance<A: OnePassAlgorithm>(
    alg: &A,
    samples: &[A::Sample],
    first_step: usize,
    mut state: BitState,
    rand: &SharedRandomness,
) -> Result<BitState> {
    let budget = state.capacity_bits();
    for (k, sample) in samples.iter().enumerate() {
        let fresh = alg.clone();
        state = launder(fresh.update(first_step + k, sample, state, rand)?, budget)?;
    }
    Ok(state)
}

/// Runs `alg` over `samples` in list order from `s₀ = 0` under a `budget_bits` memory bound.
pub fn run_one_pass<A: OnePassAlgorithm>(
    alg: &A,
    samples: &[A::Sample],
    budget_bits: usize,
    seed: u64,
) -> Result<A::Output> {
    run_one_pass_with_state(alg, samples, budget_bits, seed).map(|(out, _)| out)
}

/// Like [`run_one_pass`], also returning the final memory configuration.
pub fn run_one_pass_with_state<A: OnePassAlgorithm>(
    alg: &A,
    samples: &[A::Sample],
    budget_bits: usize,
    seed: u64,
) -> Result<(A::Output, BitState)> {
    if budget_bits == 0 {
        return Err(Error::InvalidParameter("bit budget must be at least 1".into()));
    }
    let rand = SharedRandomness::new(seed);
    let state = advance(alg, samples, 0, BitState::zeroed(budget_bits), &rand)?;
    let out = alg.clone().finalize(&state, &rand)?;
    Ok((out, state))
}

const SHUFFLE_LABEL: u64 = 0x5348_5546;

/// Uniformly random arrival order, deterministic in `seed`.
pub fn shuffle<T>(mut samples: Vec<T>, seed: u64) -> Vec<T> {
    let mut rng = SharedRandomness::new(seed).derive(SHUFFLE_LABEL).rng_at(0);
    samples.shuffle(&mut rng);
    samples
}
