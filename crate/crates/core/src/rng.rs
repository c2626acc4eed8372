//! Counter-derived random streams.
//!
//! Every stochastic component draws from `stream(seed, tag, index)`, so the
//! numbers consumed by work item `index` never depend on scheduling.

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

pub fn stream(seed: u64, tag: u32, index: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (u64::from(tag) << 40));
    rng.set_stream(index);
    rng
}

/// Standard normal variate by Box-Muller.
pub fn gaussian(rng: &mut StreamRng) -> f64 {
    let u1: f64 = 1.0 - rng.random::<f64>();
    let u2: f64 = rng.random::<f64>();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

pub fn gaussian_vec(rng: &mut StreamRng, dim: usize) -> Vec<f64> {
    (0..dim).map(|_| gaussian(rng)).collect()
}

pub fn uniform(rng: &mut StreamRng) -> f64 {
    rng.random::<f64>()
}

pub fn below(rng: &mut StreamRng, n: usize) -> usize {
    rng.random_range(0..n)
}
