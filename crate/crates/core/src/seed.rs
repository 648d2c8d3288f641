//! Seed derivation for reproducible Monte Carlo trials.
//!
//! Each trial, frame or noise stream gets its own seed computed from a
//! parent seed and an index with the splitmix64 finalizer:
//!
//! ```text
//! derive_seed(parent, index) = splitmix64(parent ^ splitmix64(index + 0x9E37_79B9_7F4A_7C15))
//! ```
//!
//! so results never depend on worker count or scheduling order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The splitmix64 output function.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn derive_seed(parent: u64, index: u64) -> u64 {
    splitmix64(parent ^ splitmix64(index.wrapping_add(0x9E37_79B9_7F4A_7C15)))
}

/// ChaCha8 generator seeded from `(parent, index)`.
pub fn rng_for(parent: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(parent, index))
}
