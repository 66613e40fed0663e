//! Seed plumbing. Every replicate `r` of an experiment seeded with `s` draws
//! from its own generator seeded with [`mix64`]`(s, r)`, so the output never
//! depends on how replicates are scheduled across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// The splitmix64 finalizer (Steele, Lea & Flood), a bijective avalanche mix.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Substream seed for replicate `stream` of master seed `seed`.
pub fn mix64(seed: u64, stream: u64) -> u64 {
    let golden = 0x9E37_79B9_7F4A_7C15u64;
    splitmix64(splitmix64(seed).wrapping_add(stream.wrapping_add(1).wrapping_mul(golden)))
}

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Runs `f(replicate_index, substream_seed)` for every replicate in parallel
/// and returns the results in replicate order.
pub fn map_replicates<T, F>(n: usize, seed: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize, u64) -> T + Sync + Send,
{
    (0..n)
        .into_par_iter()
        .map(|r| f(r, mix64(seed, r as u64)))
        .collect()
}
