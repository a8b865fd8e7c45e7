use std::marker::PhantomData;

use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::linalg::sample_uniform_sphere;
use crate::streaming::{BitState, OnePassAlgorithm, SharedRandomness};
use crate::Result;

/// Ignores the stream and outputs `0 ∈ ℝ^d`. Uses no memory.
#[derive(Debug)]
pub struct ZeroPredictor<S> {
    d: usize,
    _sample: PhantomData<fn(&S)>,
}

impl<S> Clone for ZeroPredictor<S> {
    fn clone(&self) -> Self {
        ZeroPredictor::new(self.d)
    }
}

impl<S> ZeroPredictor<S> {
    pub fn new(d: usize) -> Self {
        ZeroPredictor { d, _sample: PhantomData }
    }
}

impl<S> OnePassAlgorithm for ZeroPredictor<S> {
    type Sample = S;
    type Output = DVector<f64>;

    fn update(&self, _: usize, _: &S, state: BitState, _: &SharedRandomness) -> Result<BitState> {
        Ok(state)
    }

    fn finalize(&self, _: &BitState, _: &SharedRandomness) -> Result<DVector<f64>> {
        Ok(DVector::zeros(self.d))
    }
}

/// Ignores the stream and outputs a uniform unit vector drawn from its own seed.
#[derive(Debug)]
pub struct RandomUnitPredictor<S> {
    d: usize,
    seed: u64,
    _sample: PhantomData<fn(&S)>,
}

impl<S> Clone for RandomUnitPredictor<S> {
    fn clone(&self) -> Self {
        RandomUnitPredictor::new(self.d, self.seed)
    }
}

impl<S> RandomUnitPredictor<S> {
    pub fn new(d: usize, seed: u64) -> Self {
        RandomUnitPredictor {
            d,
            seed,
            _sample: PhantomData,
        }
    }
}

impl<S> OnePassAlgorithm for RandomUnitPredictor<S> {
    type Sample = S;
    type Output = DVector<f64>;

    fn update(&self, _: usize, _: &S, state: BitState, _: &SharedRandomness) -> Result<BitState> {
        Ok(state)
    }

    fn finalize(&self, _: &BitState, _: &SharedRandomness) -> Result<DVector<f64>> {
        sample_uniform_sphere(self.d, &mut ChaCha8Rng::seed_from_u64(self.seed))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::streaming::run_one_pass;

    #[test]
    fn baselines_need_one_bit() {
        let z = ZeroPredictor::<u8>::new(3);
        assert_eq!(run_one_pass(&z, &[1, 2], 1, 0).unwrap(), DVector::zeros(3));
        let r = RandomUnitPredictor::<u8>::new(5, 9);
        let w = run_one_pass(&r, &[1, 2], 1, 0).unwrap();
        assert!((w.norm() - 1.0).abs() < 1e-12);
        assert_eq!(w, run_one_pass(&r, &[], 1, 3).unwrap());
        assert_ne!(w, run_one_pass(&RandomUnitPredictor::<u8>::new(5, 10), &[], 1, 0).unwrap());
    }
}
