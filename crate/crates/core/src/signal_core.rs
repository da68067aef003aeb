//! Ingestion and preprocessing of uniformly sampled signals: linear
//! resampling, zero-phase Butterworth low-pass filtering, and framing.

use crate::error::{Error, Result};

const MODULE: &str = "signal_core";

/// A uniformly sampled real-valued signal.
#[derive(Clone, Debug, PartialEq)]
pub struct TimeSeries {
    values: Vec<f64>,
    sample_rate_hz: f64,
    id: String,
}

impl TimeSeries {
    /// Builds a series, requiring finite values, a positive sample rate and
    /// at least two samples.
    pub fn new(id: impl Into<String>, values: Vec<f64>, sample_rate_hz: f64) -> Result<TimeSeries> {
        if values.len() < 2 {
            return Err(Error::invalid(
                MODULE,
                format!("series needs at least 2 samples, got {}", values.len()),
            ));
        }
        if !sample_rate_hz.is_finite() || sample_rate_hz <= 0.0 {
            return Err(Error::invalid(
                MODULE,
                format!("sample rate must be positive, got {sample_rate_hz}"),
            ));
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::invalid(
                MODULE,
                format!("non-finite sample at index {pos}"),
            ));
        }
        Ok(TimeSeries {
            values,
            sample_rate_hz,
            id: id.into(),
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn sample_rate_hz(&self) -> f64 {
        self.sample_rate_hz
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Total duration spanned by the samples, `(len - 1) / sample_rate_hz`.
    pub fn duration_s(&self) -> f64 {
        (self.values.len() - 1) as f64 / self.sample_rate_hz
    }
}

/// Low-pass filter specification. The cutoff must sit below the Nyquist
/// frequency of whatever series the filter is applied to.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FilterSpec {
    pub order: usize,
    pub cutoff_hz: f64,
}

impl FilterSpec {
    pub fn new(order: usize, cutoff_hz: f64) -> Result<FilterSpec> {
        if order == 0 {
            return Err(Error::invalid(MODULE, "filter order must be positive"));
        }
        if !cutoff_hz.is_finite() || cutoff_hz <= 0.0 {
            return Err(Error::invalid(
                MODULE,
                format!("cutoff must be positive, got {cutoff_hz}"),
            ));
        }
        Ok(FilterSpec { order, cutoff_hz })
    }
}

/// Equal-length segments cut from one series, possibly subsampled.
#[derive(Clone, Debug)]
pub struct FrameSet {
    pub frames: Vec<TimeSeries>,
    pub frame_len_samples: usize,
    /// Original 0-based frame indices of the retained frames.
    pub selected_indices: Vec<usize>,
}

/// Linear interpolation of `ts` onto a uniform grid of `target_len` points
/// spanning the same time interval. Endpoints are preserved exactly.
pub fn resample_linear(ts: &TimeSeries, target_len: usize) -> Result<TimeSeries> {
    if ts.len() < 2 {
        return Err(Error::invalid(MODULE, "cannot resample fewer than 2 samples"));
    }
    if target_len < 2 {
        return Err(Error::invalid(
            MODULE,
            format!("target length must be at least 2, got {target_len}"),
        ));
    }
    let src = ts.values();
    let n = src.len();
    if target_len == n {
        return Ok(ts.clone());
    }
    let step = (n - 1) as f64 / (target_len - 1) as f64;
    let mut out = Vec::with_capacity(target_len);
    out.push(src[0]);
    for j in 1..target_len - 1 {
        let pos = j as f64 * step;
        let i = (pos.floor() as usize).min(n - 2);
        let frac = pos - i as f64;
        out.push(src[i] * (1.0 - frac) + src[i + 1] * frac);
    }
    out.push(src[n - 1]);
    let rate = ts.sample_rate_hz() * (target_len - 1) as f64 / (n - 1) as f64;
    TimeSeries::new(ts.id(), out, rate)
}

/// One second-order section of a digital filter, direct form II transposed.
#[derive(Clone, Copy, Debug)]
struct Biquad {
    b0: f64,
    b1: f64,
    b2: f64,
    a1: f64,
    a2: f64,
}

impl Biquad {
    /// State initialised to the steady-state response for a step of height
    /// `u`, so a constant input passes through without a transient.
    fn steady_state(&self, u: f64) -> (f64, f64) {
        let gain = (self.b0 + self.b1 + self.b2) / (1.0 + self.a1 + self.a2);
        let y = gain * u;
        let s2 = self.b2 * u - self.a2 * y;
        let s1 = (self.b1 + self.b2) * u - (self.a1 + self.a2) * y;
        (s1, s2)
    }

    fn run(&self, x: &mut [f64]) {
        let (mut s1, mut s2) = self.steady_state(x[0]);
        for v in x.iter_mut() {
            let xin = *v;
            let y = self.b0 * xin + s1;
            s1 = self.b1 * xin - self.a1 * y + s2;
            s2 = self.b2 * xin - self.a2 * y;
            *v = y;
        }
    }
}

/// Butterworth low-pass design by bilinear transform with frequency
/// prewarping, returned as cascaded second-order sections.
fn butterworth_lowpass_sos(order: usize, cutoff_hz: f64, sample_rate_hz: f64) -> Vec<Biquad> {
    let warped = (std::f64::consts::PI * cutoff_hz / sample_rate_hz).tan();
    let n = order as f64;
    let mut sections = Vec::with_capacity(order / 2 + 1);
    for k in 0..order / 2 {
        // Conjugate analog pole pair at angle theta on the unit circle,
        // scaled by the warped cutoff: s^2 + c*w*s + w^2.
        let theta = std::f64::consts::PI * (2.0 * k as f64 + n + 1.0) / (2.0 * n);
        let c = -2.0 * theta.cos();
        let w = warped;
        let a0 = 1.0 + c * w + w * w;
        sections.push(Biquad {
            b0: w * w / a0,
            b1: 2.0 * w * w / a0,
            b2: w * w / a0,
            a1: 2.0 * (w * w - 1.0) / a0,
            a2: (1.0 - c * w + w * w) / a0,
        });
    }
    if order % 2 == 1 {
        // Real pole at -w.
        let w = warped;
        let a0 = 1.0 + w;
        sections.push(Biquad {
            b0: w / a0,
            b1: w / a0,
            b2: 0.0,
            a1: (w - 1.0) / a0,
            a2: 0.0,
        });
    }
    sections
}

/// Forward-backward (zero net phase) Butterworth low-pass filter.
///
/// The signal is padded on both ends with `3 * 2 * order` odd-reflected
/// samples before the forward pass; the padding is trimmed after the
/// backward pass. The magnitude response of the combined pass is the square
/// of the single-pass Butterworth magnitude.
pub fn zero_phase_lowpass(ts: &TimeSeries, spec: &FilterSpec) -> Result<TimeSeries> {
    let nyquist = ts.sample_rate_hz() / 2.0;
    if spec.cutoff_hz >= nyquist {
        return Err(Error::invalid(
            MODULE,
            format!(
                "cutoff {} Hz is not below the Nyquist frequency {} Hz",
                spec.cutoff_hz, nyquist
            ),
        ));
    }
    let pad = 3 * (2 * spec.order);
    if ts.len() <= pad {
        return Err(Error::invalid(
            MODULE,
            format!(
                "series of {} samples is too short for edge padding of {}",
                ts.len(),
                pad
            ),
        ));
    }
    let x = ts.values();
    let n = x.len();
    let mut buf = Vec::with_capacity(n + 2 * pad);
    // Odd reflection about the end points suppresses edge transients.
    for i in 0..pad {
        buf.push(2.0 * x[0] - x[pad - i]);
    }
    buf.extend_from_slice(x);
    for i in 0..pad {
        buf.push(2.0 * x[n - 1] - x[n - 2 - i]);
    }

    let sections = butterworth_lowpass_sos(spec.order, spec.cutoff_hz, ts.sample_rate_hz());
    for s in &sections {
        s.run(&mut buf);
    }
    buf.reverse();
    for s in &sections {
        s.run(&mut buf);
    }
    buf.reverse();

    let out = buf[pad..pad + n].to_vec();
    TimeSeries::new(ts.id(), out, ts.sample_rate_hz())
}

/// Splits a series into `n_frames` contiguous equal blocks (trailing
/// remainder dropped), optionally keeps only the odd frames (1-based
/// numbering: frames 1, 3, 5, ...), and stride-subsamples each retained
/// frame to exactly `points_per_frame` samples.
pub fn frame_pipeline(
    ts: &TimeSeries,
    n_frames: usize,
    keep_odd: bool,
    points_per_frame: usize,
) -> Result<FrameSet> {
    if n_frames == 0 {
        return Err(Error::invalid(MODULE, "frame count must be positive"));
    }
    let block_len = ts.len() / n_frames;
    if block_len == 0 {
        return Err(Error::invalid(
            MODULE,
            format!("{} frames do not fit in {} samples", n_frames, ts.len()),
        ));
    }
    if points_per_frame < 2 {
        return Err(Error::invalid(MODULE, "points per frame must be at least 2"));
    }
    if points_per_frame > block_len {
        return Err(Error::invalid(
            MODULE,
            format!(
                "points per frame {} exceeds frame length {}",
                points_per_frame, block_len
            ),
        ));
    }
    let stride = block_len / points_per_frame;
    let rate = ts.sample_rate_hz() / stride as f64;
    let x = ts.values();
    let mut frames = Vec::new();
    let mut selected = Vec::new();
    for f in 0..n_frames {
        if keep_odd && f % 2 == 1 {
            continue;
        }
        let start = f * block_len;
        let vals: Vec<f64> = (0..points_per_frame).map(|j| x[start + j * stride]).collect();
        frames.push(TimeSeries::new(
            format!("{}:frame{}", ts.id(), f + 1),
            vals,
            rate,
        )?);
        selected.push(f);
    }
    Ok(FrameSet {
        frames,
        frame_len_samples: points_per_frame,
        selected_indices: selected,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series(values: Vec<f64>, rate: f64) -> TimeSeries {
        TimeSeries::new("t", values, rate).unwrap()
    }

    #[test]
    fn timeseries_rejects_bad_inputs() {
        assert!(TimeSeries::new("x", vec![1.0], 1.0).is_err());
        assert!(TimeSeries::new("x", vec![1.0, f64::NAN], 1.0).is_err());
        assert!(TimeSeries::new("x", vec![1.0, 2.0], 0.0).is_err());
        assert!(TimeSeries::new("x", vec![1.0, 2.0], -3.0).is_err());
    }

    #[test]
    fn resample_constant_stays_constant() {
        let ts = series(vec![5.0, 5.0, 5.0], 1.0);
        let out = resample_linear(&ts, 7).unwrap();
        assert_eq!(out.len(), 7);
        assert!(out.values().iter().all(|&v| v == 5.0));
    }

    #[test]
    fn resample_preserves_linear_ramp() {
        let ts = series(vec![0.0, 1.0, 2.0], 1.0);
        let out = resample_linear(&ts, 5).unwrap();
        let expect = [0.0, 0.5, 1.0, 1.5, 2.0];
        for (a, b) in out.values().iter().zip(expect.iter()) {
            assert!((a - b).abs() < 1e-15, "{a} vs {b}");
        }
    }

    #[test]
    fn resample_same_length_is_identity() {
        let ts = series(vec![0.25, -1.5, 3.75, 0.0], 4.0);
        let out = resample_linear(&ts, 4).unwrap();
        assert_eq!(out.values(), ts.values());
    }

    #[test]
    fn resample_rejects_target_below_two() {
        let ts = series(vec![1.0, 2.0], 1.0);
        assert!(resample_linear(&ts, 1).is_err());
    }

    #[test]
    fn filter_rejects_cutoff_at_or_above_nyquist() {
        let ts = series(vec![0.0; 200].to_vec(), 32.0);
        let spec = FilterSpec::new(4, 16.0).unwrap();
        let err = zero_phase_lowpass(&ts, &spec).unwrap_err();
        assert_eq!(err.module(), "signal_core");
    }

    #[test]
    fn filter_rejects_short_series() {
        let ts = series(vec![0.0; 24].to_vec(), 32.0);
        let spec = FilterSpec::new(4, 1.2).unwrap();
        assert!(zero_phase_lowpass(&ts, &spec).is_err());
    }

    #[test]
    fn filter_passes_dc_exactly() {
        let ts = series(vec![3.25; 512].to_vec(), 32.0);
        let spec = FilterSpec::new(4, 1.2).unwrap();
        let out = zero_phase_lowpass(&ts, &spec).unwrap();
        assert_eq!(out.len(), 512);
        for v in out.values() {
            assert!((v - 3.25).abs() < 1e-9);
        }
    }

    #[test]
    fn frame_pipeline_odd_selection() {
        let ts = series((0..620).map(|i| i as f64).collect(), 32.0);
        let fs = frame_pipeline(&ts, 62, true, 10).unwrap();
        assert_eq!(fs.frames.len(), 31);
        assert_eq!(fs.selected_indices[0], 0);
        assert_eq!(fs.selected_indices[30], 60);
    }

    #[test]
    fn frame_pipeline_stride_one_reproduces_input() {
        let ts = series((0..100).map(|i| (i as f64).sin()).collect(), 1.0);
        let fs = frame_pipeline(&ts, 10, false, 10).unwrap();
        assert_eq!(fs.frames.len(), 10);
        let concat: Vec<f64> = fs
            .frames
            .iter()
            .flat_map(|f| f.values().iter().copied())
            .collect();
        assert_eq!(concat, ts.values());
    }

    #[test]
    fn frame_pipeline_stride_subsamples_from_first() {
        let ts = series((0..19_200).map(|i| i as f64).collect(), 32.0);
        let fs = frame_pipeline(&ts, 1, false, 1200).unwrap();
        let f = &fs.frames[0];
        assert_eq!(f.len(), 1200);
        assert_eq!(f.values()[0], 0.0);
        assert_eq!(f.values()[1], 16.0); // stride floor(19200/1200)
    }

    #[test]
    fn frame_pipeline_rejects_oversized_points() {
        let ts = series((0..100).map(|i| i as f64).collect(), 1.0);
        assert!(frame_pipeline(&ts, 10, false, 11).is_err());
    }
}
