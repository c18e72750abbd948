//! Seeded random streams.
//!
//! Every random draw in the crate comes from a `StreamRng`, a ChaCha8
//! counter-mode generator addressed by a (seed, stream) pair of 64-bit
//! integers. Distinct streams under one seed are independent, so concurrent
//! consumers never share generator state. The stream ids in use:
//!
//! ```text
//! 0   resolving a sampled true weight vector (unit-sphere draws)
//! 1   synthetic feature/label generation
//! 2   dataset shuffling for train/test splits
//! ```
//!
//! Derived draws are pinned to explicit algorithms so the sequence is part of
//! the crate contract: uniforms take the top 53 bits of `next_u64`, bounded
//! integers use rejection sampling, and standard normals use the Marsaglia
//! polar transform with the spare variate cached.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

pub const STREAM_BETA: u64 = 0;
pub const STREAM_DATA: u64 = 1;
pub const STREAM_SPLIT: u64 = 2;

pub struct StreamRng {
    inner: ChaCha8Rng,
    spare_normal: Option<f64>,
}

impl StreamRng {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(stream);
        StreamRng {
            inner,
            spare_normal: None,
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform in [0, 1) with 53 random mantissa bits.
    pub fn uniform(&mut self) -> f64 {
        (self.inner.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform integer in [0, n) by rejection, free of modulo bias.
    pub fn below(&mut self, n: u64) -> u64 {
        assert!(n > 0, "below(0) is undefined");
        // Largest multiple of n representable in u64, minus one.
        let zone = u64::MAX - (u64::MAX % n + 1) % n;
        loop {
            let x = self.inner.next_u64();
            if x <= zone {
                return x % n;
            }
        }
    }

    /// Standard normal via the Marsaglia polar method; generates pairs and
    /// caches the spare.
    pub fn normal(&mut self) -> f64 {
        if let Some(z) = self.spare_normal.take() {
            return z;
        }
        loop {
            let u = 2.0 * self.uniform() - 1.0;
            let v = 2.0 * self.uniform() - 1.0;
            let s = u * u + v * v;
            if s > 0.0 && s < 1.0 {
                let f = (-2.0 * s.ln() / s).sqrt();
                self.spare_normal = Some(v * f);
                return u * f;
            }
        }
    }
}

/// Derives a child seed from (seed, salt) with a splitmix64 finalizer; used
/// to give every trial of a multi-run protocol its own seed while keeping
/// the master seed the single source of randomness.
pub fn mix_seed(seed: u64, salt: u64) -> u64 {
    let mut z = seed
        .wrapping_add(salt.wrapping_mul(0x9E37_79B9_7F4A_7C15))
        .wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
