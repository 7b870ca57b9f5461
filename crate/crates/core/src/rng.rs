//! Reproducible, splittable random streams.
//!
//! Every generator in the crate is ChaCha8 keyed by a 64-bit seed and
//! positioned on a 64-bit stream. Equal `(seed, stream_id)` pairs give the
//! same output bit for bit; different stream ids under one seed, or
//! different forked seeds, give independent streams.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngState {
    pub seed: u64,
    pub stream_id: u64,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl RngState {
    pub const fn new(seed: u64, stream_id: u64) -> Self {
        Self { seed, stream_id }
    }

    /// Same key, another stream. Used for replica `i` of a batch.
    pub const fn with_stream(self, stream_id: u64) -> Self {
        Self { seed: self.seed, stream_id }
    }

    /// A fresh key derived from this state and `label`, on stream 0.
    pub fn fork(self, label: u64) -> Self {
        let key = splitmix64(self.seed ^ splitmix64(self.stream_id ^ splitmix64(label)));
        Self { seed: key, stream_id: 0 }
    }

    pub fn generator(self) -> StreamRng {
        let mut inner = ChaCha8Rng::seed_from_u64(self.seed);
        inner.set_stream(self.stream_id);
        StreamRng { inner }
    }
}

/// A positioned ChaCha8 stream with the uniform primitives the samplers use.
#[derive(Debug, Clone)]
pub struct StreamRng {
    inner: ChaCha8Rng,
}

const TWO_POW_M53: f64 = 1.0 / (1u64 << 53) as f64;

impl StreamRng {
    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform on the open interval `(0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        ((self.next_u64() >> 11) as f64 + 0.5) * TWO_POW_M53
    }

    /// Exponential with mean 1.
    pub fn exp1(&mut self) -> f64 {
        -self.uniform().ln()
    }

    /// Standard normal by the polar method.
    pub fn normal(&mut self) -> f64 {
        loop {
            let u = 2.0 * self.uniform() - 1.0;
            let v = 2.0 * self.uniform() - 1.0;
            let s = u * u + v * v;
            if s > 0.0 && s < 1.0 {
                return u * (-2.0 * s.ln() / s).sqrt();
            }
        }
    }
}

impl RngCore for StreamRng {
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
