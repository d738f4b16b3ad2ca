//! Counter-based seed derivation.
//!
//! Every random stream in the crate is a `ChaCha8Rng` seeded from a 64-bit
//! value. Child seeds are derived from a root seed with
//! `derive(root, stream, index) = mix(mix(root ^ mix(stream)) ^ index)` where
//! `mix` is the SplitMix64 finalizer. A shot's randomness therefore depends
//! only on `(root, stream, index)` and never on thread scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream tags used by the crate. Arbitrary distinct constants.
pub mod stream {
    pub const BUILD: u64 = 0x0062_7569_6c64;
    pub const SHOT: u64 = 0x7368_6f74;
    pub const JITTER: u64 = 0x6a69_7474;
    pub const SEQUENCE: u64 = 0x0073_6571;
    pub const CALIBRATION: u64 = 0x0063_616c;
    pub const BOX: u64 = 0x0062_6f78;
    pub const BREAKDOWN: u64 = 0x0062_726b;
}

#[inline]
pub fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

#[inline]
pub fn derive(root: u64, stream: u64, index: u64) -> u64 {
    mix(mix(root ^ mix(stream)) ^ index)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
