//! Per-run random streams.
//!
//! A run's seed is a SplitMix64 mix of the base seed, a hash of the policy
//! label, the instance index and the replicate index. Each run then draws
//! rewards from ChaCha8 stream 0 and feeds the policy from stream 1.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// SplitMix64 finalizer.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// 64-bit FNV-1a.
pub fn fnv1a(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xcbf2_9ce4_8422_2325, |h, &b| {
        (h ^ u64::from(b)).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

/// Seed of one run.
pub fn run_seed(base_seed: u64, policy: &str, instance: u64, replicate: u64) -> u64 {
    let h = splitmix64(base_seed ^ fnv1a(policy.as_bytes()));
    let h = splitmix64(h ^ instance);
    splitmix64(h ^ replicate.rotate_left(32))
}

/// `(reward stream, policy stream)` of a run.
pub fn run_streams(seed: u64) -> (ChaCha8Rng, ChaCha8Rng) {
    let mut rewards = ChaCha8Rng::seed_from_u64(seed);
    rewards.set_stream(0);
    let mut policy = rewards.clone();
    policy.set_stream(1);
    (rewards, policy)
}

/// Stream for drawing uniform-prior arm means of one replicate. It does not
/// depend on the policy, so every policy faces the same instances.
pub fn means_stream(base_seed: u64, replicate: u64) -> ChaCha8Rng {
    let seed = splitmix64(splitmix64(base_seed ^ fnv1a(b"uniform-means")) ^ replicate);
    ChaCha8Rng::seed_from_u64(seed)
}
