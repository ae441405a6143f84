//! Seeded pseudo-random stream shared by every randomized operation.
//!
//! The generator is ChaCha with 8 rounds, keyed by the little-endian bytes of
//! the 64-bit seed followed by 24 zero bytes, stream 0. Only the raw `u64`
//! output is taken from the backing crate; every derived quantity is computed
//! here so the stream can be reproduced outside Rust.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

pub const PRNG_NAME: &str = "chacha8";
pub const PRNG_VERSION: &str = "v1";

pub struct Prng {
    inner: ChaCha8Rng,
}

impl Prng {
    pub fn seeded(seed: u64) -> Self {
        let mut key = [0u8; 32];
        key[..8].copy_from_slice(&seed.to_le_bytes());
        Prng {
            inner: ChaCha8Rng::from_seed(key),
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform in [0, 1) with 53 bits of precision.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.next_f64() < p
    }

    /// Uniform integer in `0..bound` by rejection; `bound` must be positive.
    pub fn below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0, "below(0)");
        let zone = u64::MAX - (u64::MAX % bound);
        loop {
            let x = self.next_u64();
            if x < zone {
                return x % bound;
            }
        }
    }

    /// Uniform integer in `lo..=hi`.
    pub fn range_inclusive(&mut self, lo: u64, hi: u64) -> u64 {
        lo + self.below(hi - lo + 1)
    }

    /// Fisher-Yates, walking from the back.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.below(i as u64 + 1) as usize;
            items.swap(i, j);
        }
    }

    /// `k` distinct values from `0..n`, sorted ascending (partial Fisher-Yates).
    pub fn sample_distinct(&mut self, n: usize, k: usize) -> Vec<u32> {
        assert!(k <= n);
        let mut pool: Vec<u32> = (0..n as u32).collect();
        for i in 0..k {
            let j = i + self.below((n - i) as u64) as usize;
            pool.swap(i, j);
        }
        let mut out = pool[..k].to_vec();
        out.sort_unstable();
        out
    }
}

/// Mixes a base seed with a path of integers into an independent child seed
/// (SplitMix64 finalizer applied per component).
pub fn derive_seed(seed: u64, path: &[u64]) -> u64 {
    let mut h = seed;
    for &x in path {
        h = mix(h ^ mix(x.wrapping_add(0x9e37_79b9_7f4a_7c15)));
    }
    h
}

fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
