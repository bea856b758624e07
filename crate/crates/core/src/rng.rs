//! Seeded, stream-separated randomness.
//!
//! Every stochastic operation takes an [`RngStream`]. A stream is identified by
//! `(seed, stream_id)` and is backed by ChaCha8, whose output is specified
//! bit-for-bit and therefore identical across platforms.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    stream_id: u64,
    inner: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(stream_id);
        Self { seed, stream_id, inner }
    }

    /// Stream whose id is derived by hashing `(seed, coords)`.
    ///
    /// Used for sweep cells and trial batches so that results do not depend on
    /// execution order.
    pub fn derived(seed: u64, coords: &[u64]) -> Self {
        Self::new(seed, derive_stream_id(seed, coords))
    }

    /// Independent child stream, e.g. one per trial of a batch.
    pub fn child(&self, index: u64) -> Self {
        Self::derived(self.seed, &[self.stream_id, index])
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// A uniformly random bit.
    pub fn bit(&mut self) -> u8 {
        (self.inner.next_u32() & 1) as u8
    }

    /// Bernoulli draw with success probability `p`.
    pub fn bernoulli(&mut self, p: f64) -> bool {
        if p <= 0.0 {
            return false;
        }
        if p >= 1.0 {
            return true;
        }
        self.unit() < p
    }

    /// Uniform float in `[0, 1)` with 53 bits of precision.
    pub fn unit(&mut self) -> f64 {
        (self.inner.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform integer in `[lo, hi]` (inclusive).
    pub fn range_inclusive(&mut self, lo: u64, hi: u64) -> u64 {
        use rand::Rng;
        self.inner.random_range(lo..=hi)
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.inner.fill_bytes(dst)
    }
}

pub fn derive_stream_id(seed: u64, coords: &[u64]) -> u64 {
    let mut hasher = Sha256::new();
    hasher.update(seed.to_le_bytes());
    for c in coords {
        hasher.update(c.to_le_bytes());
    }
    let digest = hasher.finalize();
    let mut word = [0u8; 8];
    word.copy_from_slice(&digest[..8]);
    u64::from_le_bytes(word)
}
