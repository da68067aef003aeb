//! Seeded random draws used across the crate.
//!
//! All randomness flows through a ChaCha8 stream so that every generator
//! is bit-reproducible from its `(parameters, seed)` pair. Gaussians come
//! from the Box-Muller transform of two uniforms (cosine branch, two
//! uniforms consumed per draw); Gamma variates use Marsaglia-Tsang
//! squeeze-rejection on top of those Gaussians.

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// The crate-wide seeded generator.
pub fn chacha(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Standard normal draw via Box-Muller.
pub fn standard_normal(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = 1.0 - rng.random::<f64>(); // (0, 1]
    let u2: f64 = rng.random();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// Gamma(shape, 1) draw, shape > 0, by Marsaglia-Tsang.
pub fn gamma(rng: &mut ChaCha8Rng, shape: f64) -> f64 {
    assert!(shape > 0.0 && shape.is_finite(), "gamma shape must be positive");
    if shape < 1.0 {
        let boost = (1.0 - rng.random::<f64>()).powf(1.0 / shape);
        return gamma(rng, shape + 1.0) * boost;
    }
    let d = shape - 1.0 / 3.0;
    let c = 1.0 / (9.0 * d).sqrt();
    loop {
        let x = standard_normal(rng);
        let t = 1.0 + c * x;
        if t <= 0.0 {
            continue;
        }
        let v = t * t * t;
        let u: f64 = 1.0 - rng.random::<f64>();
        if u.ln() < 0.5 * x * x + d - d * v + d * v.ln() {
            return d * v;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normal_moments() {
        let mut rng = chacha(11);
        let n = 100_000;
        let draws: Vec<f64> = (0..n).map(|_| standard_normal(&mut rng)).collect();
        let mean = draws.iter().sum::<f64>() / n as f64;
        let var = draws.iter().map(|d| (d - mean) * (d - mean)).sum::<f64>() / (n - 1) as f64;
        assert!(mean.abs() < 4.0 / (n as f64).sqrt());
        assert!((var - 1.0).abs() < 0.02);
    }

    #[test]
    fn gamma_moments() {
        let mut rng = chacha(5);
        let shape = 3.5;
        let n = 100_000;
        let draws: Vec<f64> = (0..n).map(|_| gamma(&mut rng, shape)).collect();
        let mean = draws.iter().sum::<f64>() / n as f64;
        assert!((mean - shape).abs() < 0.05, "mean {mean}");
    }

    #[test]
    fn gamma_small_shape() {
        let mut rng = chacha(9);
        let n = 50_000;
        let draws: Vec<f64> = (0..n).map(|_| gamma(&mut rng, 0.4)).collect();
        assert!(draws.iter().all(|&d| d > 0.0));
        let mean = draws.iter().sum::<f64>() / n as f64;
        assert!((mean - 0.4).abs() < 0.02, "mean {mean}");
    }

    #[test]
    fn streams_are_reproducible() {
        let a: Vec<f64> = {
            let mut rng = chacha(42);
            (0..10).map(|_| standard_normal(&mut rng)).collect()
        };
        let b: Vec<f64> = {
            let mut rng = chacha(42);
            (0..10).map(|_| standard_normal(&mut rng)).collect()
        };
        assert_eq!(a, b);
    }
}
