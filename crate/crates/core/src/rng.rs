//! Seeded random streams.
//!
//! Every random quantity in the crate is drawn from a [`SeedStream`], a thin
//! wrapper over the ChaCha20 counter-based generator. Uniform and Gaussian
//! variates are produced by fixed transforms of the raw 64-bit output so that
//! a given seed reproduces the same numbers on every platform:
//!
//! * uniform on `[0, 1)`: the top 53 bits of a `u64` scaled by `2^-53`;
//! * standard normal: Box–Muller, `sqrt(-2 ln u1) * cos(2π u2)` with
//!   `u1 = 1 - uniform()` so the logarithm never sees zero, the sine branch
//!   cached for the next call.

use rand_chacha::ChaCha20Rng;
use rand_core::{RngCore, SeedableRng};

/// SplitMix64 finalizer.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Per-task seed: `mix64(mix64(master) ^ mix64(index + 1))`.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    mix64(mix64(master) ^ mix64(index.wrapping_add(1)))
}

pub struct SeedStream {
    rng: ChaCha20Rng,
    spare_normal: Option<f64>,
}

impl SeedStream {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha20Rng::seed_from_u64(seed),
            spare_normal: None,
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// Uniform on `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform on `[lo, hi)`.
    pub fn uniform_in(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    pub fn standard_normal(&mut self) -> f64 {
        if let Some(z) = self.spare_normal.take() {
            return z;
        }
        let u1 = 1.0 - self.uniform();
        let u2 = self.uniform();
        let r = (-2.0 * u1.ln()).sqrt();
        let theta = std::f64::consts::TAU * u2;
        self.spare_normal = Some(r * theta.sin());
        r * theta.cos()
    }

    pub fn normal(&mut self, mean: f64, std_dev: f64) -> f64 {
        mean + std_dev * self.standard_normal()
    }

    /// Point uniform in the disc of the given radius (area-correct radial law).
    pub fn in_disc(&mut self, radius: f64) -> (f64, f64) {
        let r = radius * self.uniform().sqrt();
        let theta = std::f64::consts::TAU * self.uniform();
        (r * theta.cos(), r * theta.sin())
    }
}
