use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Shared random tape: an unbounded, counter-addressable sequence of uniforms.
///
/// Value `i` is the `i`-th 64-bit word of the ChaCha8 keystream for `seed`,
/// so any party can read any position without coordination, and
/// [`SharedRandomness::rng_at`] gives a sequential view that agrees with
/// [`SharedRandomness::uniform`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SharedRandomness {
    seed: u64,
}

const TWO_POW_NEG_53: f64 = 1.0 / (1u64 << 53) as f64;

impl SharedRandomness {
    pub fn new(seed: u64) -> Self {
        SharedRandomness { seed }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Generator positioned at tape index `index`.
    pub fn rng_at(&self, index: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_word_pos(2 * index as u128);
        rng
    }

    pub fn word(&self, index: u64) -> u64 {
        self.rng_at(index).next_u64()
    }

    /// Uniform value in [0, 1) at `index`.
    pub fn uniform(&self, index: u64) -> f64 {
        word_to_unit(self.word(index))
    }

    /// An independent tape, addressed by `label`.
    pub fn derive(&self, label: u64) -> SharedRandomness {
        SharedRandomness::new(mix(self.seed ^ mix(label.wrapping_add(0x6a09_e667_f3bc_c909))))
    }
}

pub(crate) fn word_to_unit(w: u64) -> f64 {
    (w >> 11) as f64 * TWO_POW_NEG_53
}

/// SplitMix64 finalizer.
pub fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed for item `index` of a batch started from `base`.
pub fn derive_seed(base: u64, index: u64) -> u64 {
    mix(base ^ mix(index))
}
