//! Deterministic seed derivation.
//!
//! Every random quantity in the crate is a pure function of the 64-bit master
//! seed, a context string, and an index chain. The derivation is frozen:
//!
//! ```text
//! state(master, ctx)      = mix64(master ^ fnv1a64(ctx))
//! child(state, i)         = mix64(state ^ (i * 0x9e3779b97f4a7c15))
//! uniform01(state)        = (state >> 11) * 2^-53          in [0, 1)
//! rng(state)              = ChaCha8 seeded from state
//! ```
//!
//! `mix64` is the Stafford variant-13 finalizer (the SplitMix64 output mix).
//! Changing any constant is a breaking change to recorded experiments; the
//! test suite pins vectors.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

/// SplitMix64 output permutation (Stafford mix 13).
#[inline]
pub fn mix64(mut x: u64) -> u64 {
    x ^= x >> 30;
    x = x.wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x ^= x >> 27;
    x = x.wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^= x >> 31;
    x
}

/// FNV-1a over the raw bytes.
#[inline]
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// Map a 64-bit state to the unit interval using the top 53 bits.
#[inline]
pub fn uniform01(x: u64) -> f64 {
    (x >> 11) as f64 * (1.0 / 9_007_199_254_740_992.0)
}

/// A point in the derivation tree. Cheap to copy; children are pure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeedDomain(u64);

impl SeedDomain {
    /// Root of a derivation chain for one named purpose.
    pub fn derive(master: u64, context: &str) -> Self {
        SeedDomain(mix64(master ^ fnv1a64(context.as_bytes())))
    }

    /// Child stream for one index (trial number, edge id, stack depth, ...).
    #[inline]
    pub fn child(self, index: u64) -> Self {
        SeedDomain(mix64(self.0 ^ index.wrapping_mul(GOLDEN)))
    }

    #[inline]
    pub fn state(self) -> u64 {
        self.0
    }

    /// Uniform draw in [0, 1) determined by this domain alone.
    #[inline]
    pub fn uniform01(self) -> f64 {
        uniform01(self.0)
    }

    /// Stream RNG for sequential consumption (walks, shuffles).
    pub fn rng(self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mix64_bijective_on_samples() {
        // mix64 is a bijection; sampled collisions would indicate a typo in
        // the constants.
        let mut seen = std::collections::HashSet::new();
        for i in 0..10_000u64 {
            assert!(seen.insert(mix64(i)));
        }
    }

    #[test]
    fn derivation_vectors_frozen() {
        // Pinned outputs: any change here invalidates recorded experiments.
        assert_eq!(mix64(0), 0);
        assert_eq!(mix64(1), 0x5692_161d_100b_05e5);
        assert_eq!(fnv1a64(b""), 0xcbf2_9ce4_8422_2325);
        assert_eq!(fnv1a64(b"percolation/labels"), 0xd508_2be5_2bea_120f);
        let d = SeedDomain::derive(42, "percolation/labels");
        assert_eq!(d.state(), 0x086c_c8fc_1bdd_e61b);
        assert_eq!(d.child(0).state(), 0x8dc4_1540_3ed7_889c);
        assert_eq!(d.child(7).state(), 0x679c_9bc8_1c41_edbb);
        let tail = format!("{:.6}", d.child(7).uniform01());
        assert_eq!(tail, "0.404733");
    }

    #[test]
    fn uniform01_range_and_distinct_contexts() {
        let a = SeedDomain::derive(7, "a");
        let b = SeedDomain::derive(7, "b");
        assert_ne!(a.state(), b.state());
        for i in 0..1000 {
            let u = a.child(i).uniform01();
            assert!((0.0..1.0).contains(&u));
        }
    }

    #[test]
    fn chacha_stream_reproducible() {
        use rand::RngCore;
        let mut r1 = SeedDomain::derive(9, "walk").child(3).rng();
        let mut r2 = SeedDomain::derive(9, "walk").child(3).rng();
        for _ in 0..32 {
            assert_eq!(r1.next_u64(), r2.next_u64());
        }
    }
}
