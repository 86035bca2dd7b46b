//! Seeded xoshiro256++ streams.
//!
//! Every stochastic operation in the crate draws from a stream created here,
//! so a run is fully reproducible from its seed. Substreams (one per tree,
//! per fold, ...) are derived by index so parallel and serial execution see
//! identical randomness.

use rand::SeedableRng;
use rand_xoshiro::Xoshiro256PlusPlus;

pub(crate) fn stream(seed: u64) -> Xoshiro256PlusPlus {
    Xoshiro256PlusPlus::seed_from_u64(seed)
}

/// Independent stream `index` derived from `seed`.
pub(crate) fn substream(seed: u64, index: u64) -> Xoshiro256PlusPlus {
    Xoshiro256PlusPlus::seed_from_u64(mix(seed, index))
}

// SplitMix64 finalizer over (seed, index); decorrelates adjacent indices.
fn mix(seed: u64, index: u64) -> u64 {
    let mut z = seed
        .wrapping_add(index.wrapping_mul(0x9E37_79B9_7F4A_7C15))
        .wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
