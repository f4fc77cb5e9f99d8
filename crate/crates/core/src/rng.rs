//! Reproducible random streams.
//!
//! Every resample, bootstrap draw and simulated dataset gets its own
//! ChaCha8 stream. The 64-bit key is built by folding identifying integers
//! into the master seed with SplitMix64, and the stream index selects one of
//! ChaCha's 2^64 independent streams for that key. Results therefore do not
//! depend on the order in which tasks are executed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Folds `parts` into `seed`, order-sensitively.
pub fn derive_key(seed: u64, parts: &[u64]) -> u64 {
    parts
        .iter()
        .fold(splitmix64(seed), |acc, &p| splitmix64(acc ^ splitmix64(p)))
}

/// Stream `index` of the generator keyed by `key`.
pub fn stream(key: u64, index: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(key);
    rng.set_stream(index);
    rng
}

/// In-place Fisher-Yates shuffle (Durstenfeld, high index down).
pub fn fisher_yates<T, R: Rng + ?Sized>(items: &mut [T], rng: &mut R) {
    for i in (1..items.len()).rev() {
        let j = rng.random_range(0..=i);
        items.swap(i, j);
    }
}
