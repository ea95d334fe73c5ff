//! Deterministic stream derivation.
//!
//! Every parallel unit of work (a walk, a training sentence) gets its own RNG
//! seeded from the run seed plus the unit's coordinates, so output does not
//! depend on worker scheduling.

use rand_chacha::ChaCha8Rng;
use rand_chacha::rand_core::SeedableRng;

/// splitmix64 finalizer; full-avalanche 64-bit mix.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derive a child seed from a run seed and up to three coordinates.
#[inline]
pub fn derive_seed(seed: u64, a: u64, b: u64, c: u64) -> u64 {
    mix64(seed ^ mix64(a ^ mix64(b ^ mix64(c))))
}

/// RNG for the work unit at coordinates `(a, b, c)` under `seed`.
#[inline]
pub fn stream_rng(seed: u64, a: u64, b: u64, c: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(seed, a, b, c))
}
