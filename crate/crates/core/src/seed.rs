//! Seed derivation.
//!
//! Every random stream in the crate is a [`ChaCha8Rng`] seeded from a 64-bit
//! value. Child seeds are derived from a master seed and a path of integers
//! (for instance `[guess, run]`) by folding each part through the SplitMix64
//! finalizer:
//!
//! ```text
//! h = splitmix64(master)
//! for part in path: h = splitmix64(h ^ splitmix64(part + 0x9E3779B97F4A7C15))
//! ```
//!
//! The scheme is stable across releases; reports depend on it.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Default master seed for the CLI.
pub const DEFAULT_SEED: u64 = 0xC0FFEE;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// The SplitMix64 output function.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives an independent child seed from `master` and a path of indices.
pub fn derive_seed(master: u64, path: &[u64]) -> u64 {
    path.iter().fold(splitmix64(master), |h, &part| {
        splitmix64(h ^ splitmix64(part.wrapping_add(GOLDEN)))
    })
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
