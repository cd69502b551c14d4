//! Seeded randomness.
//!
//! Every random quantity in the crate is drawn from ChaCha8 seeded through
//! `SeedableRng::seed_from_u64`, so a `u64` seed fully determines a run.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub type SeededRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Complex standard Gaussian with independent real and imaginary parts.
pub fn complex_gaussian(rng: &mut SeededRng) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im)
}

/// Complex number with real and imaginary parts uniform on (-1, 1).
pub fn complex_uniform_pm1(rng: &mut SeededRng) -> Complex64 {
    Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}
