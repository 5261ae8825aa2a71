//! Deterministic seed derivation, so parallel trials reproduce independently of scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Mixes `base` with a path of indices (SplitMix64 finalizer per step).
pub fn derive_seed(base: u64, path: &[u64]) -> u64 {
    path.iter().fold(mix(base), |acc, &p| mix(acc ^ mix(p.wrapping_add(0x9E37_79B9_7F4A_7C15))))
}

pub fn rng_for(base: u64, path: &[u64]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(base, path))
}

fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn paths_are_distinguished() {
        assert_ne!(derive_seed(1, &[0, 1]), derive_seed(1, &[1, 0]));
        assert_ne!(derive_seed(1, &[]), derive_seed(2, &[]));
        assert_eq!(derive_seed(7, &[3]), derive_seed(7, &[3]));
    }
}
