//! The seeded generator behind every random stream in the crate.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Name recorded in output metadata so sample streams can be reproduced.
pub const RNG_ALGORITHM: &str = "ChaCha8Rng/seed_from_u64 (rand_chacha 0.9)";

pub type SeededRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Inverse-CDF draw from a cumulative row (last entry ≈ 1).
#[inline]
pub fn draw_from_cdf(cdf: &[f64], u: f64) -> usize {
    let i = cdf.partition_point(|c| *c <= u);
    i.min(cdf.len() - 1)
}

/// Cumulative sums of a probability row.
pub fn cumulative(row: &[f64]) -> Vec<f64> {
    let mut acc = 0.0;
    row.iter()
        .map(|p| {
            acc += p;
            acc
        })
        .collect()
}
