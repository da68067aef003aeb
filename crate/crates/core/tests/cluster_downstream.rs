mod common;

use phenots::cluster_downstream::{
    classical_mds, complete_linkage, cut, summarize_clusters, CutCriterion,
};
use phenots::fuzzy_cluster::DistanceMatrix;
use phenots::rng;
use rand::RngExt;

fn random_distance_matrix(n: usize, seed: u64) -> DistanceMatrix {
    // Euclidean distances of random planar points: a valid metric with
    // distinct values almost surely.
    let mut rng = rng::chacha(seed);
    let pts: Vec<(f64, f64)> = (0..n)
        .map(|_| (rng.random::<f64>() * 10.0, rng.random::<f64>() * 10.0))
        .collect();
    DistanceMatrix::from_fn(n, Vec::new(), |i, j| {
        let dx = pts[i].0 - pts[j].0;
        let dy = pts[i].1 - pts[j].1;
        (dx * dx + dy * dy).sqrt()
    })
    .unwrap()
}

#[test]
fn linkage_matches_brute_force_oracle() {
    for trial in 0..100 {
        let n = 2 + (trial % 7);
        let dist = random_distance_matrix(n, 3000 + trial as u64);
        let dendro = complete_linkage(&dist).unwrap();
        let oracle = common::complete_linkage_oracle(&dist);
        assert_eq!(dendro.merges.len(), oracle.len());
        for (got, want) in dendro.merges.iter().zip(&oracle) {
            assert_eq!((got.a, got.b), (want.0, want.1), "trial {trial}");
            assert_eq!(got.height, want.2, "trial {trial}");
        }
    }
}

#[test]
fn linkage_heights_are_nondecreasing() {
    for trial in 0..50 {
        let dist = random_distance_matrix(8, 7000 + trial);
        let dendro = complete_linkage(&dist).unwrap();
        for w in dendro.merges.windows(2) {
            assert!(w[1].height >= w[0].height);
        }
    }
}

#[test]
fn cut_produces_exactly_k_groups_for_distinct_heights() {
    for trial in 0..30 {
        let n = 6 + (trial % 5);
        let dist = random_distance_matrix(n, 11_000 + trial as u64);
        let dendro = complete_linkage(&dist).unwrap();
        for k in 1..=n {
            let labels = cut(&dendro, CutCriterion::Count(k)).unwrap();
            let distinct: std::collections::BTreeSet<usize> = labels.iter().copied().collect();
            assert_eq!(distinct.len(), k, "trial {trial}, k {k}");
            // Labels are numbered by smallest leaf: label 0 contains leaf 0.
            assert_eq!(labels[0], 0);
        }
    }
}

#[test]
fn mds_recovers_planar_configurations() {
    let mut rng = rng::chacha(55);
    for _ in 0..10 {
        let n = 12;
        let pts: Vec<Vec<f64>> = (0..n)
            .map(|_| vec![rng.random::<f64>() * 4.0, rng.random::<f64>() * 4.0])
            .collect();
        let dist = DistanceMatrix::from_fn(n, Vec::new(), |i, j| {
            let dx = pts[i][0] - pts[j][0];
            let dy = pts[i][1] - pts[j][1];
            (dx * dx + dy * dy).sqrt()
        })
        .unwrap();
        let res = classical_mds(&dist, 2).unwrap();
        let rms = common::procrustes_rms(&pts, &res.coordinates);
        assert!(rms < 1e-9, "procrustes rms {rms}");
        // Euclidean input: eigenvalues essentially nonnegative.
        assert!(res.eigenvalues.iter().all(|&l| l >= -1e-9));
        assert!(!res.truncated);
    }
}

#[test]
fn mds_reproduces_distances_for_embeddable_input() {
    let dist = random_distance_matrix(10, 321);
    let res = classical_mds(&dist, 2).unwrap();
    for i in 0..10 {
        for j in (i + 1)..10 {
            let dx = res.coordinates[i][0] - res.coordinates[j][0];
            let dy = res.coordinates[i][1] - res.coordinates[j][1];
            let d = (dx * dx + dy * dy).sqrt();
            assert!((d - dist.get(i, j)).abs() < 1e-9);
        }
    }
}

#[test]
fn synthetic_cohort_summary_orders_groups_as_expected() {
    // Periodic-like subjects: high flat profiles; noisy subjects: low,
    // variable profiles. The summary must reflect higher scores and lower
    // frame variability for the periodic cluster.
    let mut rng = rng::chacha(99);
    let mut profiles = Vec::new();
    let mut labels = Vec::new();
    let mut severity = Vec::new();
    for s in 0..6 {
        let periodic = s < 3;
        let base = if periodic { 0.8 } else { 0.3 };
        let wobble = if periodic { 0.02 } else { 0.15 };
        let profile: Vec<f64> = (0..31)
            .map(|_| base + wobble * (rng.random::<f64>() - 0.5))
            .collect();
        profiles.push(profile);
        labels.push(if periodic { 0 } else { 1 });
        severity.push(if periodic { 2.0 } else { 10.0 });
    }
    let summary = summarize_clusters(&labels, &profiles, &severity).unwrap();
    assert_eq!(summary.clusters.len(), 2);
    let periodic = &summary.clusters[0];
    let noisy = &summary.clusters[1];
    assert_eq!(periodic.count + noisy.count, 6);
    assert!(periodic.score_mean > noisy.score_mean);
    assert!(periodic.frame_sd_mean < noisy.frame_sd_mean);
    assert!(periodic.severity_mean < noisy.severity_mean);
}
