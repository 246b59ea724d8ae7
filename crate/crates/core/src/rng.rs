//! Named random sub-streams derived from one run seed.
//!
//! Every consumer of randomness asks for its own stream by name, so adding a
//! new consumer never shifts the draws seen by existing ones.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const SEED_POOL: &str = "seed-pool";
pub const GENERATOR: &str = "generator";
pub const PROFILES: &str = "profiles";
pub const TWEETS: &str = "tweets";
pub const TEST_SAMPLE: &str = "test-sample";
pub const BASELINE: &str = "baseline";
pub const LABEL_PROPAGATION: &str = "label-propagation";
pub const REFERENCE: &str = "reference";

/// Stream `name` of the generator seeded by `seed`.
pub fn substream(seed: u64, name: &str) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(fnv1a(name.as_bytes()));
    rng
}

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        hash ^= u64::from(b);
        hash = hash.wrapping_mul(0x0100_0000_01b3);
    }
    hash
}
