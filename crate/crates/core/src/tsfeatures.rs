//! Time-domain (ACF/PACF) and frequency-domain (Welch) features of a
//! series, plus weighted distances between feature vectors.

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::signal_core::TimeSeries;

const MODULE: &str = "tsfeatures";

/// Which correlation function a vector holds.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CorrelationKind {
    Acf,
    Pacf,
}

/// Correlation values indexed by lag `1..=max_lag`.
#[derive(Clone, Debug)]
pub struct CorrelationVector {
    pub kind: CorrelationKind,
    values: Vec<f64>,
}

impl CorrelationVector {
    pub fn new(kind: CorrelationKind, values: Vec<f64>) -> Result<CorrelationVector> {
        if values.is_empty() {
            return Err(Error::invalid(MODULE, "correlation vector must be non-empty"));
        }
        if values.iter().any(|v| !v.is_finite() || v.abs() > 1.0 + 1e-12) {
            return Err(Error::invalid(MODULE, "correlations must lie in [-1, 1]"));
        }
        Ok(CorrelationVector { kind, values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn max_lag(&self) -> usize {
        self.values.len()
    }

    /// Correlation at `lag` (1-based).
    pub fn at(&self, lag: usize) -> f64 {
        self.values[lag - 1]
    }
}

/// Symmetric nonnegative-definite weight matrix for feature distances.
#[derive(Clone, Debug)]
pub struct WeightMatrix {
    n: usize,
    values: Vec<f64>,
}

impl WeightMatrix {
    pub fn new(n: usize, values: Vec<f64>) -> Result<WeightMatrix> {
        if values.len() != n * n {
            return Err(Error::invalid(
                MODULE,
                format!("weight matrix needs {} entries, got {}", n * n, values.len()),
            ));
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if (values[i * n + j] - values[j * n + i]).abs() > 1e-12 {
                    return Err(Error::invalid(
                        MODULE,
                        format!("weight matrix asymmetric at ({i},{j})"),
                    ));
                }
            }
        }
        Ok(WeightMatrix { n, values })
    }

    pub fn identity(n: usize) -> WeightMatrix {
        let mut values = vec![0.0; n * n];
        for i in 0..n {
            values[i * n + i] = 1.0;
        }
        WeightMatrix { n, values }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n + j]
    }
}

/// One-sided spectral density normalized to sum to one.
#[derive(Clone, Debug)]
pub struct SpectralDensity {
    pub frequencies_hz: Vec<f64>,
    pub density: Vec<f64>,
}

/// Biased sample autocorrelation of the mean-centered values, all lags up
/// to `max_lag`, computed through the FFT of the padded centered series.
pub(crate) fn acf_values(values: &[f64], max_lag: usize) -> Result<Vec<f64>> {
    let n = values.len();
    if max_lag == 0 {
        return Err(Error::invalid(MODULE, "max lag must be positive"));
    }
    if max_lag >= n {
        return Err(Error::invalid(
            MODULE,
            format!("max lag {max_lag} must be below series length {n}"),
        ));
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    let centered: Vec<f64> = values.iter().map(|v| v - mean).collect();
    if centered.iter().all(|&c| c == 0.0) {
        return Err(Error::degenerate(MODULE, "constant series has no autocorrelation"));
    }

    let m = (n + max_lag + 1).next_power_of_two();
    let mut planner = FftPlanner::<f64>::new();
    let fft = planner.plan_fft_forward(m);
    let ifft = planner.plan_fft_inverse(m);
    let mut buf: Vec<Complex<f64>> = centered
        .iter()
        .map(|&c| Complex::new(c, 0.0))
        .chain(std::iter::repeat(Complex::new(0.0, 0.0)))
        .take(m)
        .collect();
    fft.process(&mut buf);
    for v in buf.iter_mut() {
        *v = Complex::new(v.norm_sqr(), 0.0);
    }
    ifft.process(&mut buf);

    let denom = buf[0].re;
    if denom <= 0.0 {
        return Err(Error::degenerate(MODULE, "zero variance series"));
    }
    Ok((1..=max_lag).map(|t| buf[t].re / denom).collect())
}

/// Sample autocorrelation function at lags `1..=max_lag`.
pub fn acf(ts: &TimeSeries, max_lag: usize) -> Result<CorrelationVector> {
    Ok(CorrelationVector {
        kind: CorrelationKind::Acf,
        values: acf_values(ts.values(), max_lag)?,
    })
}

/// Partial autocorrelations derived from the sample ACF by the
/// Durbin-Levinson recursion.
pub fn pacf(ts: &TimeSeries, max_lag: usize) -> Result<CorrelationVector> {
    let rho = acf_values(ts.values(), max_lag)?;
    Ok(CorrelationVector {
        kind: CorrelationKind::Pacf,
        values: durbin_levinson(&rho)?,
    })
}

/// Durbin-Levinson recursion mapping an ACF sequence (lags 1..=r) to the
/// partial autocorrelations at the same lags.
fn durbin_levinson(rho: &[f64]) -> Result<Vec<f64>> {
    let r = rho.len();
    let mut pacf = Vec::with_capacity(r);
    let mut phi_prev: Vec<f64> = Vec::new();
    let mut v = 1.0_f64;
    for k in 1..=r {
        let phi_kk = if k == 1 {
            rho[0]
        } else {
            if v.abs() < 1e-14 {
                return Err(Error::degenerate(
                    MODULE,
                    format!("prediction variance vanished at lag {k}"),
                ));
            }
            let mut num = rho[k - 1];
            for j in 1..k {
                num -= phi_prev[j - 1] * rho[k - j - 1];
            }
            num / v
        };
        let mut phi_cur = Vec::with_capacity(k);
        for j in 1..k {
            phi_cur.push(phi_prev[j - 1] - phi_kk * phi_prev[k - j - 1]);
        }
        phi_cur.push(phi_kk);
        v *= 1.0 - phi_kk * phi_kk;
        pacf.push(phi_kk);
        phi_prev = phi_cur;
    }
    Ok(pacf)
}

/// Euclidean distance between equal-length feature vectors: the weighted
/// distance with an identity weight matrix, without materializing it.
pub fn euclidean_distance(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::invalid(
            MODULE,
            format!("dimension mismatch: {} vs {}", a.len(), b.len()),
        ));
    }
    Ok(a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt())
}

/// Weighted quadratic-form distance `sqrt((a-b)' W (a-b))` between raw
/// feature vectors.
pub fn weighted_distance(a: &[f64], b: &[f64], omega: &WeightMatrix) -> Result<f64> {
    if a.len() != b.len() || omega.dim() != a.len() {
        return Err(Error::invalid(
            MODULE,
            format!(
                "dimension mismatch: {} vs {} with weights {}",
                a.len(),
                b.len(),
                omega.dim()
            ),
        ));
    }
    let diff: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let n = diff.len();
    let mut q = 0.0;
    for i in 0..n {
        let mut row = 0.0;
        for j in 0..n {
            row += omega.get(i, j) * diff[j];
        }
        q += diff[i] * row;
    }
    Ok(q.max(0.0).sqrt())
}

/// Distance between two correlation vectors of the same kind and lag range.
pub fn feature_distance(
    a: &CorrelationVector,
    b: &CorrelationVector,
    omega: &WeightMatrix,
) -> Result<f64> {
    if a.kind != b.kind {
        return Err(Error::invalid(MODULE, "correlation kinds differ"));
    }
    weighted_distance(a.values(), b.values(), omega)
}

/// Tukey (tapered cosine) window of `len` points. `taper` 0 gives a
/// rectangular window, 1 the Hann window.
pub fn tukey_window(len: usize, taper: f64) -> Result<Vec<f64>> {
    if len < 2 {
        return Err(Error::invalid(MODULE, "window length must be at least 2"));
    }
    if !(0.0..=1.0).contains(&taper) {
        return Err(Error::invalid(
            MODULE,
            format!("taper must lie in [0, 1], got {taper}"),
        ));
    }
    if taper == 0.0 {
        return Ok(vec![1.0; len]);
    }
    let nm1 = (len - 1) as f64;
    let width = taper * nm1 / 2.0;
    let mut w = vec![1.0; len];
    for i in 0..len {
        let x = i as f64;
        if x < width {
            w[i] = 0.5 * (1.0 + (std::f64::consts::PI * (x / width - 1.0)).cos());
        } else if x > nm1 - width {
            w[i] = 0.5 * (1.0 + (std::f64::consts::PI * (x - (nm1 - width)) / width).cos());
        }
    }
    Ok(w)
}

/// Welch's averaged periodogram, one-sided, normalized to a density that
/// sums to one.
///
/// The series is split into blocks of `window_len` samples advancing by
/// `window_len * (1 - overlap_fraction)`; each block is mean-removed,
/// tapered by a Tukey window, and transformed; block periodograms are
/// averaged and the result normalized.
pub fn welch_density(
    ts: &TimeSeries,
    window_len: usize,
    overlap_fraction: f64,
    taper: f64,
) -> Result<SpectralDensity> {
    let n = ts.len();
    if window_len > n {
        return Err(Error::invalid(
            MODULE,
            format!("window of {window_len} exceeds series length {n}"),
        ));
    }
    if window_len < 2 || window_len % 2 != 0 {
        return Err(Error::invalid(
            MODULE,
            format!("window length must be even and at least 2, got {window_len}"),
        ));
    }
    if !(0.0..1.0).contains(&overlap_fraction) {
        return Err(Error::invalid(
            MODULE,
            format!("overlap fraction must lie in [0, 1), got {overlap_fraction}"),
        ));
    }
    let window = tukey_window(window_len, taper)?;
    let hop = (window_len - (window_len as f64 * overlap_fraction).floor() as usize).max(1);

    let mut planner = FftPlanner::<f64>::new();
    let fft = planner.plan_fft_forward(window_len);
    let half = window_len / 2;
    let mut acc = vec![0.0; half + 1];
    let mut blocks = 0usize;
    let x = ts.values();
    let mut start = 0;
    while start + window_len <= n {
        let block = &x[start..start + window_len];
        let mean = block.iter().sum::<f64>() / window_len as f64;
        let mut buf: Vec<Complex<f64>> = block
            .iter()
            .zip(&window)
            .map(|(&v, &w)| Complex::new((v - mean) * w, 0.0))
            .collect();
        fft.process(&mut buf);
        for k in 0..=half {
            // One-sided: interior bins carry both halves of the spectrum.
            let scale = if k == 0 || k == half { 1.0 } else { 2.0 };
            acc[k] += scale * buf[k].norm_sqr();
        }
        blocks += 1;
        start += hop;
    }
    debug_assert!(blocks > 0);
    let total: f64 = acc.iter().sum();
    if total <= 0.0 {
        return Err(Error::degenerate(MODULE, "signal has no spectral power"));
    }
    let density: Vec<f64> = acc.iter().map(|v| v / total).collect();
    let df = ts.sample_rate_hz() / window_len as f64;
    let frequencies_hz: Vec<f64> = (0..=half).map(|k| k as f64 * df).collect();
    Ok(SpectralDensity {
        frequencies_hz,
        density,
    })
}
