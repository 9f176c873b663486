//! Seed handling. Every stochastic component takes an explicit `u64` seed and
//! derives child seeds by hashing, so results never depend on scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

pub fn rng(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derive a child seed from a parent seed and a sequence of tags.
pub fn derive(seed: u64, tags: &[u64]) -> u64 {
    tags.iter()
        .fold(splitmix(seed), |acc, &t| splitmix(acc ^ splitmix(t)))
}

/// Hash an arbitrary slice of small integers into a tag.
pub fn hash_slice<T: Copy + Into<u64>>(values: &[T]) -> u64 {
    values
        .iter()
        .fold(splitmix(values.len() as u64), |acc, &v| splitmix(acc ^ v.into()))
}

/// Hash a string into a tag.
pub fn hash_str(s: &str) -> u64 {
    hash_slice(s.as_bytes())
}
