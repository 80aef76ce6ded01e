//! Deterministic seed plumbing.
//!
//! Every estimator in this crate draws from a counter-based stream: sample
//! `i` of a run seeded with `s` uses an RNG seeded by `mix2(s, i)`. Results
//! are therefore a pure function of `(seed, index)` and independent of
//! evaluation order, which is what lets the CLI fan work out across any
//! number of workers without changing a single output bit.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

/// SplitMix64 finalizer; the standard 64-bit avalanche mixer.
pub fn splitmix64(state: u64) -> u64 {
    let mut z = state.wrapping_add(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// Combines a seed with one stream index.
pub fn mix2(seed: u64, a: u64) -> u64 {
    splitmix64(splitmix64(seed) ^ a.wrapping_mul(0xd6e8feb86659fd93))
}

/// Combines a seed with two stream indices.
pub fn mix3(seed: u64, a: u64, b: u64) -> u64 {
    mix2(mix2(seed, a), b)
}

/// The stream RNG used throughout: ChaCha8, seeded per sample.
pub type StreamRng = ChaCha8Rng;

pub fn stream(seed: u64, index: u64) -> StreamRng {
    StreamRng::seed_from_u64(mix2(seed, index))
}

/// Uniform draw in `[0, 1)` with 53 bits of precision.
pub fn uniform_f64(rng: &mut impl RngCore) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / 9007199254740992.0)
}

/// Uniform draw in `[lo, hi)`.
pub fn uniform_in(rng: &mut impl RngCore, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * uniform_f64(rng)
}
