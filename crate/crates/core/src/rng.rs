//! Seed derivation.
//!
//! Every random stream in the pipeline is keyed by (master seed, index,
//! stage), never by evaluation order, so columns can be generated in any
//! order — or in parallel — and come out identical.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Pipeline stage tags. Distinct tags keep the streams of different stages
/// disjoint even when they share an index.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Stage {
    Feature = 0,
    Correlation = 1,
    Combination = 2,
    Target = 3,
    Noise = 4,
    /// Per-column substream of a noise spec.
    NoiseColumn = 5,
    /// Train/test and validation splits.
    Split = 6,
}

/// SplitMix64 finalizer. Bijective on u64, full avalanche.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives the seed for one (index, stage) slot under a master seed.
///
/// Pure; distinct (index, stage) pairs collide only with ~2^-64 probability.
pub fn derive_seed(master: u64, index: u64, stage: Stage) -> u64 {
    let mut s = mix64(master);
    s = mix64(s ^ index);
    mix64(s ^ (stage as u64))
}

/// The deterministic RNG used everywhere in the crate.
pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
