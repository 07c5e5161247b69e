//! Seedable, splittable random streams.
//!
//! Every stochastic operation takes a `&mut RngStream`. Parallel work derives
//! one child stream per task index with [`RngStream::split`], so results do not
//! depend on scheduling.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

use crate::bloch::Vec3;

#[derive(Clone, Debug)]
pub struct RngStream {
    seed: u64,
    stream: u64,
    rng: ChaCha8Rng,
}

// SplitMix64 finalizer.
fn mix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

impl RngStream {
    pub fn new(seed: u64) -> Self {
        Self::with_stream(seed, 0)
    }

    fn with_stream(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        RngStream { seed, stream, rng }
    }

    /// Child stream for task `index`. Depends only on this stream's identity
    /// and `index`, never on how many values have been drawn from it.
    pub fn split(&self, index: u64) -> Self {
        Self::with_stream(self.seed, mix(self.stream ^ mix(index.wrapping_add(1))))
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Uniform on `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.rng.random::<f64>()
    }

    pub fn bit(&mut self) -> u8 {
        (self.rng.next_u32() & 1) as u8
    }

    /// An area-uniform point on the unit sphere.
    pub fn unit_vector(&mut self) -> Vec3 {
        let z = 2.0 * self.uniform() - 1.0;
        let phi = 2.0 * PI * self.uniform();
        let r = (1.0 - z * z).max(0.0).sqrt();
        Vec3::new(r * phi.cos(), r * phi.sin(), z)
    }

    pub(crate) fn inner(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }
}
