mod common;

use phenots::signal_core::{
    frame_pipeline, resample_linear, zero_phase_lowpass, FilterSpec, TimeSeries,
};
use proptest::prelude::*;

fn sinusoid(freq_hz: f64, fs: f64, n: usize) -> TimeSeries {
    let values: Vec<f64> = (0..n)
        .map(|t| (2.0 * std::f64::consts::PI * freq_hz * t as f64 / fs).sin())
        .collect();
    TimeSeries::new("sine", values, fs).unwrap()
}

/// Single-pass Butterworth magnitude at frequency `f`, squared for the
/// forward-backward filter, with the bilinear frequency mapping.
fn zero_phase_gain(order: u32, cutoff_hz: f64, fs: f64, f: f64) -> f64 {
    let warp = |x: f64| (std::f64::consts::PI * x / fs).tan();
    let ratio = warp(f) / warp(cutoff_hz);
    let single = 1.0 / (1.0 + ratio.powi(2 * order as i32));
    single // |H|^2 of one pass = gain of the two-pass filter on amplitude
}

#[test]
fn cutoff_amplitude_ratio_is_one_half() {
    let fs = 32.0;
    let ts = sinusoid(1.2, fs, 4096);
    let spec = FilterSpec::new(4, 1.2).unwrap();
    let out = zero_phase_lowpass(&ts, &spec).unwrap();
    // 3 cycles of 1.2 Hz at 32 Hz span exactly 80 samples.
    let amp = common::amplitude_at(out.values(), 1.2, fs, 1048, 2000);
    assert!((amp - 0.5).abs() < 0.02, "amplitude ratio {amp}");
}

#[test]
fn stopband_attenuation_at_8_hz() {
    let fs = 32.0;
    let ts = sinusoid(8.0, fs, 4096);
    let spec = FilterSpec::new(4, 1.2).unwrap();
    let out = zero_phase_lowpass(&ts, &spec).unwrap();
    let amp = common::amplitude_at(out.values(), 8.0, fs, 1024, 2048);
    assert!(amp < 1e-4, "amplitude ratio {amp}");
    // Matches the analytic Butterworth response through the bilinear map.
    let analytic = zero_phase_gain(4, 1.2, fs, 8.0);
    assert!(analytic < 1e-4);
}

#[test]
fn measured_gain_tracks_analytic_response() {
    let fs = 32.0;
    let spec = FilterSpec::new(4, 1.2).unwrap();
    for &f in &[0.4, 0.8, 1.2, 1.6, 2.0] {
        // Window with an integer cycle count: f/32*len integral.
        let len = 4000; // 0.4 Hz -> 50 cycles; 1.2 -> 150; 2.0 -> 250
        let ts = sinusoid(f, fs, 12_000);
        let out = zero_phase_lowpass(&ts, &spec).unwrap();
        let amp = common::amplitude_at(out.values(), f, fs, 4000, len);
        let expect = zero_phase_gain(4, 1.2, fs, f);
        assert!(
            (amp - expect).abs() < 0.02,
            "f = {f}: measured {amp}, analytic {expect}"
        );
    }
}

#[test]
fn double_application_squares_the_response() {
    let fs = 32.0;
    let spec = FilterSpec::new(4, 1.0).unwrap();
    for &f in &[0.8, 1.0, 1.2] {
        let ts = sinusoid(f, fs, 12_000);
        let once = zero_phase_lowpass(&ts, &spec).unwrap();
        let twice = zero_phase_lowpass(&once, &spec).unwrap();
        let len = 4000;
        let a1 = common::amplitude_at(once.values(), f, fs, 4000, len);
        let a2 = common::amplitude_at(twice.values(), f, fs, 4000, len);
        assert!(
            (a2 - a1 * a1).abs() < 0.02 * a1.max(1e-3),
            "f = {f}: twice {a2} vs once^2 {}",
            a1 * a1
        );
    }
}

#[test]
fn framing_at_reference_scale_keeps_31_odd_frames() {
    // 62 ten-minute frames at 32 Hz: 1,190,400 samples in total.
    let n = 1_190_400;
    let values: Vec<f64> = (0..n).map(|i| (i % 977) as f64).collect();
    let ts = TimeSeries::new("ref", values, 32.0).unwrap();
    let fs = frame_pipeline(&ts, 62, true, 1200).unwrap();
    assert_eq!(fs.frames.len(), 31);
    assert_eq!(fs.frame_len_samples, 1200);
    // 19,200-sample frames subsampled to 1,200 points: stride 16.
    assert_eq!(fs.frames[0].values()[1], ts.values()[16]);
    assert_eq!(
        fs.selected_indices,
        (0..62).step_by(2).collect::<Vec<usize>>()
    );
}

#[test]
fn resampled_sine_tracks_the_analytic_curve() {
    let fs = 32.0;
    let n = 256;
    let ts = sinusoid(1.0, fs, n);
    let target = 2 * n;
    let out = resample_linear(&ts, target).unwrap();
    let step = (n - 1) as f64 / (target - 1) as f64;
    let mut max_dev = 0.0_f64;
    for (j, &v) in out.values().iter().enumerate() {
        let t = j as f64 * step / fs;
        let exact = (2.0 * std::f64::consts::PI * 1.0 * t).sin();
        max_dev = max_dev.max((v - exact).abs());
    }
    assert!(max_dev < 0.02, "max deviation {max_dev}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn resample_identity_is_bit_exact(values in proptest::collection::vec(-100.0..100.0f64, 2..50)) {
        let ts = TimeSeries::new("p", values.clone(), 8.0).unwrap();
        let out = resample_linear(&ts, values.len()).unwrap();
        prop_assert_eq!(out.values(), ts.values());
    }

    #[test]
    fn resample_preserves_endpoints(values in proptest::collection::vec(-10.0..10.0f64, 2..40), target in 2usize..100) {
        let ts = TimeSeries::new("p", values.clone(), 1.0).unwrap();
        let out = resample_linear(&ts, target).unwrap();
        prop_assert_eq!(out.values()[0], values[0]);
        prop_assert_eq!(out.values()[target - 1], values[values.len() - 1]);
    }

    #[test]
    fn framing_preserves_order_and_membership(seed in 0u64..200) {
        let values: Vec<f64> = (0..240).map(|i| ((i as u64 * seed) % 97) as f64).collect();
        let ts = TimeSeries::new("p", values.clone(), 1.0).unwrap();
        let fs = frame_pipeline(&ts, 6, true, 10).unwrap();
        prop_assert_eq!(fs.frames.len(), 3);
        for (f, idx) in fs.frames.iter().zip(&fs.selected_indices) {
            let start = idx * 40;
            for (j, &v) in f.values().iter().enumerate() {
                prop_assert_eq!(v, values[start + j * 4]);
            }
        }
    }
}
