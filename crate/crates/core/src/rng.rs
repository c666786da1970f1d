//! Seeded random substreams.
//!
//! Every stochastic step draws from its own ChaCha stream, addressed by the
//! run seed, a stage tag and an index. Results depend only on that address,
//! never on the order in which work is scheduled.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

/// Stage tags partitioning the stream space.
pub mod stage {
    pub const COUNTS: u64 = 1;
    pub const BOOTSTRAP: u64 = 2;
    pub const JITTER: u64 = 3;
    pub const RANDOM_STATE: u64 = 4;
    pub const SWEEP: u64 = 5;
}

/// SplitMix64 finalizer, used to derive child seeds.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Child seed for item `index` of stage `stage` under `seed`.
pub fn derive_seed(seed: u64, stage: u64, index: u64) -> u64 {
    mix64(mix64(seed ^ mix64(stage)).wrapping_add(index))
}

/// Independent generator for `(seed, stage, index)`.
pub fn substream(seed: u64, stage: u64, index: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream((stage << 48) ^ index);
    rng
}
