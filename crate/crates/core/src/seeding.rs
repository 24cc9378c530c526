//! Deterministic RNG derivation. Every random draw in the crate comes from a
//! ChaCha stream keyed by `(seed, stream)`, so results do not depend on thread
//! scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Named sub-streams of a run seed.
pub mod tag {
    pub const CIRCUIT: u64 = 0x01;
    pub const ANGLES: u64 = 0x02;
    pub const PRUNE: u64 = 0x03;
    pub const STAGE1_NOISE: u64 = 0x10;
    pub const STAGE2_NOISE: u64 = 0x11;
    pub const EVAL_NOISE: u64 = 0x12;
}

pub fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

/// Mixes a tag into a seed (splitmix64 finalizer).
pub fn derive(seed: u64, tag: u64) -> u64 {
    let mut z = seed ^ tag.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
