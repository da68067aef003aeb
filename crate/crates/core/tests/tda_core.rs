mod common;

use phenots::fuzzy_cluster::DistanceMatrix;
use phenots::synthgen::{gen_periodic, gen_white_noise};
use phenots::tda_core::{
    bottleneck_distance_levelset, maxmin_landmarks, pca_reduce, periodicity_score,
    points_bottleneck, rips_persistence, select_delay, sliding_window_embed, standardize_cloud,
    subsample_cloud, superlevel_persistence_0d, EmbeddingConfig, PersistenceDiagram, PointCloud,
};
use phenots::rng;
use rand::RngExt;

fn unit_circle_matrix(n: usize) -> DistanceMatrix {
    DistanceMatrix::from_fn(n, Vec::new(), |i, j| {
        let a = 2.0 * std::f64::consts::PI * i as f64 / n as f64;
        let b = 2.0 * std::f64::consts::PI * j as f64 / n as f64;
        ((a.cos() - b.cos()).powi(2) + (a.sin() - b.sin()).powi(2)).sqrt()
    })
    .unwrap()
}

#[test]
fn rips_matches_brute_force_on_random_clouds() {
    for trial in 0..30 {
        let n_points = 3 + (trial % 6);
        let cloud = common::random_cloud(n_points, 2 + trial % 2, 1000 + trial as u64);
        let dist = cloud.distance_matrix();
        let max_scale = 1.5;
        let dgms = rips_persistence(&dist, 1, max_scale).unwrap();
        let oracle = common::brute_force_rips(&dist, max_scale);
        assert_eq!(common::diagram_pairs(&dgms[0]), oracle[0], "dim 0, trial {trial}");
        assert_eq!(common::diagram_pairs(&dgms[1]), oracle[1], "dim 1, trial {trial}");
    }
}

#[test]
fn circle_twenty_points_exact_geometry() {
    let dist = unit_circle_matrix(20);
    let dgms = rips_persistence(&dist, 1, 2.0).unwrap();
    assert_eq!(dgms[1].pairs.len(), 1);
    let (b, d) = dgms[1].pairs[0];
    // Frozen from the brute-force oracle: the loop is born on the adjacent
    // chord and dies when the 7-hop chord (the first with hop/n >= 1/3)
    // completes the triangulation.
    let birth = 2.0 * (std::f64::consts::PI / 20.0).sin();
    let death = 2.0 * (7.0 * std::f64::consts::PI / 20.0).sin();
    assert!((b - birth).abs() < 1e-9);
    assert!((d - death).abs() < 1e-9);

    let oracle = common::brute_force_rips(&dist, 2.0);
    assert_eq!(common::diagram_pairs(&dgms[1]), oracle[1]);
}

#[test]
fn embedded_cosine_has_rank_two() {
    let series: Vec<f64> = (0..200)
        .map(|t| (2.0 * std::f64::consts::PI * t as f64 / 12.0).cos())
        .collect();
    let cfg = EmbeddingConfig::new(4, 1, 150).unwrap();
    let cloud = sliding_window_embed(&series, &cfg).unwrap();
    // Rows are combinations of cos(wt) and sin(wt): rank 2 exactly.
    let mut mat = nalgebra::DMatrix::<f64>::zeros(cloud.n_points(), cloud.dim());
    for (i, row) in cloud.iter_points().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            mat[(i, j)] = v;
        }
    }
    let svd = mat.svd(false, false);
    let mut sv: Vec<f64> = svd.singular_values.iter().copied().collect();
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap());
    assert!(sv[2] < 1e-8 * sv[0], "third singular value {} vs {}", sv[2], sv[0]);
}

#[test]
fn pca_of_cosine_embedding_traces_a_loop() {
    let series: Vec<f64> = (0..400)
        .map(|t| (2.0 * std::f64::consts::PI * t as f64 / 12.0).cos())
        .collect();
    let cfg = EmbeddingConfig::new(6, 2, 300).unwrap();
    let cloud = sliding_window_embed(&series, &cfg).unwrap();
    let (std_cloud, _) = standardize_cloud(&cloud);
    let reduced = pca_reduce(&std_cloud, 2).unwrap();
    let mut angles: Vec<f64> = reduced
        .iter_points()
        .map(|p| p[1].atan2(p[0]))
        .collect();
    angles.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut max_gap = 0.0_f64;
    for w in 0..angles.len() {
        let gap = if w + 1 == angles.len() {
            angles[0] + 2.0 * std::f64::consts::PI - angles[w]
        } else {
            angles[w + 1] - angles[w]
        };
        max_gap = max_gap.max(gap);
    }
    assert!(
        max_gap < 2.0 * std::f64::consts::PI / 10.0,
        "largest angular gap {max_gap}"
    );
}

#[test]
fn select_delay_white_noise_returns_lag_one() {
    let ts = gen_white_noise(1.0, 10_000, 21).unwrap();
    assert_eq!(select_delay(ts.values(), 64).unwrap(), 1);
}

fn score_series(values: &[f64], seed: u64) -> f64 {
    let delay = select_delay(values, 64).unwrap();
    let p = 14;
    let points = values.len() - p * delay;
    let cfg = EmbeddingConfig::new(p, delay, points).unwrap();
    let cloud = sliding_window_embed(values, &cfg).unwrap();
    let (std_cloud, _) = standardize_cloud(&cloud);
    let reduced = pca_reduce(&std_cloud, 2).unwrap();
    let landmarks = maxmin_landmarks(&reduced, 150, seed);
    let sub = subsample_cloud(&reduced, &landmarks);
    let dgms = rips_persistence(&sub.distance_matrix(), 1, 2.0).unwrap();
    periodicity_score(&dgms[1]).unwrap()
}

#[test]
fn periodicity_separates_cosine_from_noise() {
    // Scores are taken on preprocessed series, mirroring the pipeline
    // (low-pass at three times the fundamental before embedding).
    let spec = phenots::signal_core::FilterSpec::new(4, 0.25).unwrap();
    let periodic = gen_periodic(12.0, 0.6, 1200, 7).unwrap();
    let noise = gen_white_noise(0.8, 1200, 7).unwrap();
    let pf = phenots::signal_core::zero_phase_lowpass(&periodic, &spec).unwrap();
    let nf = phenots::signal_core::zero_phase_lowpass(&noise, &spec).unwrap();
    let s_per = score_series(pf.values(), 7);
    let s_noise = score_series(nf.values(), 7);
    assert!(s_per > 0.5, "periodic score {s_per}");
    assert!(s_noise < 0.3, "noise score {s_noise}");
    assert!(s_per > s_noise);
}

#[test]
fn periodicity_score_is_amplitude_invariant_after_standardization() {
    let series: Vec<f64> = (0..600)
        .map(|t| (2.0 * std::f64::consts::PI * t as f64 / 12.0).cos())
        .collect();
    let scaled: Vec<f64> = series.iter().map(|v| v * 37.0).collect();
    let a = score_series(&series, 3);
    let b = score_series(&scaled, 3);
    assert!((a - b).abs() < 1e-9, "{a} vs {b}");
}

#[test]
fn superlevel_matches_sweep_oracle_on_random_profiles() {
    let mut rng = rng::chacha(77);
    for trial in 0..100 {
        let len = 1 + (trial % 50);
        let values: Vec<f64> = (0..len)
            .map(|_| (rng.random::<f64>() * 8.0).round() / 2.0)
            .collect();
        let dgm = superlevel_persistence_0d(&values).unwrap();
        let oracle = common::superlevel_sweep(&values);
        let mut got = dgm.pairs.clone();
        let mut want = oracle.pairs.clone();
        got.sort_by(|a, b| a.partial_cmp(b).unwrap());
        want.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(got, want, "trial {trial}, values {values:?}");
        assert_eq!(dgm.essential, oracle.essential);
    }
}

#[test]
fn superlevel_stability_under_small_perturbations() {
    let mut rng = rng::chacha(41);
    let eps = 0.01;
    for _ in 0..50 {
        let len = 10 + (rng.random::<f64>() * 30.0) as usize;
        let values: Vec<f64> = (0..len).map(|_| rng.random::<f64>()).collect();
        let perturbed: Vec<f64> = values
            .iter()
            .map(|v| v + (rng.random::<f64>() * 2.0 - 1.0) * eps)
            .collect();
        let a = superlevel_persistence_0d(&values).unwrap();
        let b = superlevel_persistence_0d(&perturbed).unwrap();
        let d = bottleneck_distance_levelset(&a, &b);
        assert!(d <= eps + 1e-12, "distance {d} exceeds {eps}");
    }
}

#[test]
fn bottleneck_matches_exhaustive_enumeration() {
    for trial in 0..50 {
        let na = trial % 5;
        let nb = (trial / 2) % 5;
        let a = common::random_diagram_points(na, 500 + trial as u64);
        let b = common::random_diagram_points(nb, 900 + trial as u64);
        let fast = points_bottleneck(&a, &b);
        let slow = common::enumerate_bottleneck(&a, &b);
        assert!(
            (fast - slow).abs() < 1e-12,
            "trial {trial}: {fast} vs {slow}"
        );
    }
}

#[test]
fn bottleneck_metric_axioms() {
    for trial in 0..100 {
        let a = common::random_diagram_points(3, 10 + trial);
        let b = common::random_diagram_points(4, 400 + trial);
        let c = common::random_diagram_points(2, 800 + trial);
        let dab = points_bottleneck(&a, &b);
        let dba = points_bottleneck(&b, &a);
        let dac = points_bottleneck(&a, &c);
        let dcb = points_bottleneck(&c, &b);
        assert!((dab - dba).abs() < 1e-9, "symmetry failed");
        assert!(dab <= dac + dcb + 1e-9, "triangle failed: {dab} > {dac} + {dcb}");
        assert!(points_bottleneck(&a, &a) < 1e-15);
    }
}

#[test]
fn diagram_json_round_trip() {
    let dgm = PersistenceDiagram::new(1, vec![(0.25, 1.5), (0.1, 2.0)], vec![false, true]).unwrap();
    let json = serde_json::to_string(&dgm).unwrap();
    assert!(json.contains("\"dim\":1"));
    assert!(json.contains("[0.25,1.5]"));
    let back: PersistenceDiagram = serde_json::from_str(&json).unwrap();
    assert_eq!(back, dgm);
}

#[test]
fn landmark_subsampling_keeps_circle_loop() {
    let n = 500;
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let t = 2.0 * std::f64::consts::PI * i as f64 / n as f64;
            vec![t.cos(), t.sin()]
        })
        .collect();
    let cloud = PointCloud::from_rows(rows).unwrap();
    let landmarks = maxmin_landmarks(&cloud, 60, 5);
    assert_eq!(landmarks.len(), 60);
    let sub = subsample_cloud(&cloud, &landmarks);
    let dgms = rips_persistence(&sub.distance_matrix(), 1, 2.0).unwrap();
    let score = periodicity_score(&dgms[1]).unwrap();
    assert!(score > 0.9, "score {score}");
}
