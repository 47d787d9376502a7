//! Small helpers on complex coefficient vectors.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// `Σ conj(a_i) b_i`.
pub fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Euclidean norm (no grid weight).
pub fn norm(a: &[Complex64]) -> f64 {
    a.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

pub fn scale(a: &mut [Complex64], s: f64) {
    a.iter_mut().for_each(|v| *v *= s);
}

/// Normalise in place and return the previous norm.
pub fn normalize(a: &mut [Complex64]) -> f64 {
    let n = norm(a);
    if n > 0.0 {
        scale(a, 1.0 / n);
    }
    n
}

/// `a -= c b`.
pub fn sub_scaled(a: &mut [Complex64], c: Complex64, b: &[Complex64]) {
    a.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
}

/// Deterministic complex vector with entries uniform in the unit square.
pub fn seeded_random(len: usize, seed: u64) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..len)
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect()
}

pub fn max_abs_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}
