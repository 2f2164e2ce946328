//! Seed derivation for independent, reproducible random streams.
//!
//! Every stream used by an experiment is keyed by a counter path below the
//! master seed:
//!
//! ```text
//! derive_seed(parent, label, index) = mix64(mix64(parent ^ mix64(label)) + GOLDEN * (index + 1))
//! ```
//!
//! where `mix64` is the SplitMix64 finalizer and `GOLDEN = 0x9E3779B97F4A7C15`.
//! Streams are then instantiated as ChaCha8 generators seeded with the
//! derived 64-bit value.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// Stream labels below a repeat seed.
pub mod label {
    pub const REPEAT: u64 = 0x5245_5045_4154;
    pub const AGENT: u64 = 0x41_4745_4E54;
    pub const TRAIN_ENV: u64 = 0x54_5241_494E;
    pub const TEST_ENV: u64 = 0x5445_5354;
    pub const TEST_AGENT: u64 = 0x5445_5354_4147;
}

pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn derive_seed(parent: u64, label: u64, index: u64) -> u64 {
    let base = mix64(parent ^ mix64(label));
    mix64(base.wrapping_add(GOLDEN.wrapping_mul(index.wrapping_add(1))))
}

pub fn rng_from_seed(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Seed of the `repeat`-th independent training run of an experiment.
pub fn repeat_seed(master: u64, repeat: u64) -> u64 {
    derive_seed(master, label::REPEAT, repeat)
}
