//! Seeded, portable random streams.
//!
//! Every stochastic stage draws from ChaCha8 (`rand_chacha::ChaCha8Rng`), whose
//! output is specified bit-for-bit independent of platform. Sub-streams (one
//! per pixel, one per frame, one per background) are derived by mixing the
//! parent seed with the stream coordinates through SplitMix64, so results do
//! not depend on iteration order or thread schedule.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

/// SplitMix64 finalizer.
#[inline]
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives a child seed from a parent seed and a list of coordinates.
pub fn derive_seed(seed: u64, coords: &[u64]) -> u64 {
    coords
        .iter()
        .fold(splitmix64(seed), |acc, &c| splitmix64(acc ^ splitmix64(c)))
}

pub fn rng_from_seed(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn child_rng(seed: u64, coords: &[u64]) -> Rng {
    rng_from_seed(derive_seed(seed, coords))
}
