//! Deterministic derivation of independent random streams.
//!
//! Stream `(base, group, replica)` is seeded with
//! `mix(mix(mix(base) ^ group) ^ replica)` where `mix` is the SplitMix64
//! finalizer, and drives a ChaCha8 generator.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Random stream type used by all samplers.
pub type Stream = ChaCha8Rng;

/// SplitMix64 finalizer.
pub fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn stream_seed(base: u64, group: u64, replica: u64) -> u64 {
    mix(mix(mix(base) ^ group) ^ replica)
}

pub fn stream(base: u64, group: u64, replica: u64) -> Stream {
    Stream::seed_from_u64(stream_seed(base, group, replica))
}
