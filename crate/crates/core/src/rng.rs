//! Seed derivation.
//!
//! Every random decision in the pipeline draws from its own ChaCha stream,
//! keyed by a master seed and a path of integer tags (replication, writer,
//! particle, iteration, ...). Streams never depend on the order in which
//! work is scheduled.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

/// Stream tags. Distinct tags keep unrelated consumers of the same master
/// seed from sharing a stream.
pub mod tag {
    pub const SPLIT: u64 = 0x5350_4c49;
    pub const GENERATOR: u64 = 0x4745_4e45;
    pub const REFERENCES: u64 = 0x5245_4653;
    pub const RANDOM_FORGERY: u64 = 0x524e_4446;
    pub const CONDENSE: u64 = 0x434e_4e53;
    pub const CLASSIFIER: u64 = 0x5356_4d30;
    pub const SWARM_INIT: u64 = 0x494e_4954;
    pub const SWARM_STEP: u64 = 0x5354_4550;
    pub const REPLICATION: u64 = 0x5245_504c;
    pub const SAMPLES: u64 = 0x5341_4d50;
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Mixes a path of tags into a master seed.
pub fn derive_seed(master: u64, path: &[u64]) -> u64 {
    path.iter().fold(splitmix64(master), |acc, &t| splitmix64(acc ^ splitmix64(t)))
}

pub fn stream(master: u64, path: &[u64]) -> Rng {
    Rng::seed_from_u64(derive_seed(master, path))
}
