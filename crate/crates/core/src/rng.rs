//! Deterministic random streams.
//!
//! Stream keys are derived by folding indices into a master seed with the
//! SplitMix64 finalizer. Each key seeds a ChaCha8 generator, a counter-based
//! generator whose output is fixed by its published algorithm, so every stream
//! is bit-reproducible across platforms and independent of worker count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// One step of SplitMix64: advances by the golden gamma and applies the
/// variant-13 finalizer.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(GOLDEN_GAMMA);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives a stream key from a master seed and a path of indices.
pub fn derive_seed(master: u64, path: &[u64]) -> u64 {
    path.iter().fold(splitmix64(master), |acc, &idx| {
        splitmix64(acc ^ idx.wrapping_mul(GOLDEN_GAMMA).rotate_left(17))
    })
}

/// Generator for a derived stream.
pub fn stream(master: u64, path: &[u64]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(master, path))
}
