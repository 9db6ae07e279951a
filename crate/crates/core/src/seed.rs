//! Seed derivation.
//!
//! Every random stream in the crate is a ChaCha8 generator seeded from a
//! `u64` obtained by `derive_seed(base, label, index)`: the label is folded in
//! with FNV-1a, then base, label hash and index are mixed with SplitMix64.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn fnv1a(label: &str) -> u64 {
    label.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| {
        (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01B3)
    })
}

/// Derive a child seed for stream `index` under `label`.
pub fn derive_seed(base: u64, label: &str, index: u64) -> u64 {
    splitmix64(splitmix64(base ^ fnv1a(label)).wrapping_add(index))
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn distinct_streams() {
        let a = derive_seed(7, "memory-sweep", 0);
        assert_eq!(a, derive_seed(7, "memory-sweep", 0));
        assert_ne!(a, derive_seed(7, "memory-sweep", 1));
        assert_ne!(a, derive_seed(7, "not-sweep", 0));
        assert_ne!(a, derive_seed(8, "memory-sweep", 0));
    }
}
