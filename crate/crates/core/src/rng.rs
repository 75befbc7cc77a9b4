//! Seed derivation. Every random consumer owns a stream addressed by
//! `(seed, domain, index)` so results do not depend on call interleaving.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub(crate) mod domain {
    pub const MIXED_BATCH: u64 = 0x6d69_7865_6462_6174;
    pub const EXP_BATCH: u64 = 0x6578_7062_6174_6368;
    pub const POOLED_BATCH: u64 = 0x706f_6f6c_6564_6261;
    pub const EPISODE: u64 = 0x6570_6973_6f64_6573;
    pub const INIT: u64 = 0x696e_6974_7061_7261;
    pub const JITTER: u64 = 0x6a69_7474_6572_7472;
    pub const TASKS: u64 = 0x7461_736b_7375_6974;
    pub const WORLD: u64 = 0x776f_726c_6467_656e;
}

pub(crate) fn stream(seed: u64, domain: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ domain.rotate_left(17));
    rng.set_stream(index);
    rng
}
