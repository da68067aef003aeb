//! Seeded synthetic signals and point clouds: test fixtures and the
//! simulation side of the statistical oracles.

use nalgebra::DMatrix;
use rand::RngExt;

use crate::dirichlet_reg::DirichletParams;
use crate::error::{Error, Result};
use crate::rng;
use crate::signal_core::TimeSeries;
use crate::tda_core::PointCloud;

const MODULE: &str = "synthgen";

/// Cosine of the given period (in samples) plus Gaussian noise, sampled at
/// integer times with unit sample rate.
pub fn gen_periodic(period: f64, noise_sd: f64, n: usize, seed: u64) -> Result<TimeSeries> {
    if !(period > 0.0) {
        return Err(Error::invalid(MODULE, format!("period must be positive, got {period}")));
    }
    if noise_sd < 0.0 || !noise_sd.is_finite() {
        return Err(Error::invalid(MODULE, format!("noise sd must be nonnegative, got {noise_sd}")));
    }
    let mut rng = rng::chacha(seed);
    let values: Vec<f64> = (0..n)
        .map(|t| {
            let x = (2.0 * std::f64::consts::PI * t as f64 / period).cos();
            x + noise_sd * rng::standard_normal(&mut rng)
        })
        .collect();
    TimeSeries::new(format!("periodic-{seed}"), values, 1.0)
}

/// Gaussian white noise with the given standard deviation.
pub fn gen_white_noise(sd: f64, n: usize, seed: u64) -> Result<TimeSeries> {
    if !(sd > 0.0) || !sd.is_finite() {
        return Err(Error::invalid(MODULE, format!("sd must be positive, got {sd}")));
    }
    let mut rng = rng::chacha(seed);
    let values: Vec<f64> = (0..n).map(|_| sd * rng::standard_normal(&mut rng)).collect();
    TimeSeries::new(format!("noise-{seed}"), values, 1.0)
}

/// Points drawn uniformly in parameter from a lemniscate of Bernoulli
/// (unit half-width) with isotropic Gaussian jitter.
pub fn gen_infinity_cloud(count: usize, noise_sd: f64, seed: u64) -> Result<PointCloud> {
    if count == 0 {
        return Err(Error::invalid(MODULE, "count must be positive"));
    }
    if noise_sd < 0.0 || !noise_sd.is_finite() {
        return Err(Error::invalid(MODULE, format!("noise sd must be nonnegative, got {noise_sd}")));
    }
    let mut rng = rng::chacha(seed);
    let rows: Vec<Vec<f64>> = (0..count)
        .map(|_| {
            let theta: f64 = rng.random::<f64>() * 2.0 * std::f64::consts::PI;
            let denom = 1.0 + theta.sin() * theta.sin();
            let x = theta.cos() / denom;
            let y = theta.sin() * theta.cos() / denom;
            let nx = noise_sd * rng::standard_normal(&mut rng);
            let ny = noise_sd * rng::standard_normal(&mut rng);
            vec![x + nx, y + ny]
        })
        .collect();
    PointCloud::from_rows(rows)
}

/// Gaussian-innovation AR(p) series after discarding `burn_in` samples.
/// The coefficients must be stationary (companion spectral radius < 1).
pub fn gen_ar(coeffs: &[f64], n: usize, seed: u64, burn_in: usize) -> Result<TimeSeries> {
    let p = coeffs.len();
    if coeffs.iter().any(|c| !c.is_finite()) {
        return Err(Error::invalid(MODULE, "non-finite coefficient"));
    }
    if p > 0 {
        let mut companion = DMatrix::<f64>::zeros(p, p);
        for (j, &c) in coeffs.iter().enumerate() {
            companion[(0, j)] = c;
        }
        for i in 1..p {
            companion[(i, i - 1)] = 1.0;
        }
        let radius = companion
            .complex_eigenvalues()
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        if radius >= 1.0 {
            return Err(Error::invalid(
                MODULE,
                format!("nonstationary coefficients (spectral radius {radius:.4})"),
            ));
        }
    }
    let mut rng = rng::chacha(seed);
    let mut history = vec![0.0; p];
    let mut values = Vec::with_capacity(n);
    for t in 0..burn_in + n {
        let mut x = rng::standard_normal(&mut rng);
        for (j, &c) in coeffs.iter().enumerate() {
            x += c * history[j];
        }
        if p > 0 {
            history.rotate_right(1);
            history[0] = x;
        }
        if t >= burn_in {
            values.push(x);
        }
    }
    TimeSeries::new(format!("ar-{seed}"), values, 1.0)
}

/// Compositional responses drawn from the regression model: per row,
/// `mu = softmax(design * beta)` with category 0 as the zero-coefficient
/// reference, then a Dirichlet(phi * mu) draw.
pub fn gen_regression_cohort(
    beta: &DMatrix<f64>,
    phi: f64,
    x: &DMatrix<f64>,
    seed: u64,
) -> Result<DMatrix<f64>> {
    if !(phi > 0.0) || !phi.is_finite() {
        return Err(Error::invalid(MODULE, format!("precision must be positive, got {phi}")));
    }
    let n = x.nrows();
    let q = x.ncols();
    if beta.ncols() != q + 1 {
        return Err(Error::invalid(
            MODULE,
            format!("beta needs {} columns (intercept + covariates), got {}", q + 1, beta.ncols()),
        ));
    }
    let k = beta.nrows() + 1;
    let mut rng = rng::chacha(seed);
    let mut out = DMatrix::zeros(n, k);
    for i in 0..n {
        let mut eta = vec![0.0; k];
        for c in 1..k {
            let mut acc = beta[(c - 1, 0)];
            for j in 0..q {
                acc += beta[(c - 1, j + 1)] * x[(i, j)];
            }
            eta[c] = acc;
        }
        let max = eta.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let mut denom = 0.0;
        for e in eta.iter_mut() {
            *e = (*e - max).exp();
            denom += *e;
        }
        let mut draw = vec![0.0; k];
        let mut total = 0.0;
        for c in 0..k {
            let alpha = phi * eta[c] / denom;
            draw[c] = rng::gamma(&mut rng, alpha);
            total += draw[c];
        }
        for c in 0..k {
            out[(i, c)] = draw[c] / total;
        }
    }
    Ok(out)
}

/// Dirichlet parameters implied by the regression model at one covariate
/// vector (reference category 0); used by the recovery oracles.
pub fn regression_alpha(beta: &DMatrix<f64>, phi: f64, x: &[f64]) -> Result<DirichletParams> {
    let q = x.len();
    if beta.ncols() != q + 1 {
        return Err(Error::invalid(MODULE, "beta columns do not match covariates"));
    }
    let k = beta.nrows() + 1;
    let mut eta = vec![0.0; k];
    for c in 1..k {
        let mut acc = beta[(c - 1, 0)];
        for j in 0..q {
            acc += beta[(c - 1, j + 1)] * x[j];
        }
        eta[c] = acc;
    }
    let max = eta.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut denom = 0.0;
    for e in eta.iter_mut() {
        *e = (*e - max).exp();
        denom += *e;
    }
    DirichletParams::new(eta.into_iter().map(|e| phi * e / denom).collect())
}
