//! Independent oracles shared by the integration and acceptance suites.
//!
//! Everything here recomputes results from first principles (full
//! boundary-matrix reduction, exhaustive matching enumeration, threshold
//! sweeps, brute-force agglomeration) without reusing the library's
//! algorithmic shortcuts, so agreement is meaningful.

#![allow(dead_code)]

use phenots::fuzzy_cluster::DistanceMatrix;
use phenots::rng;
use phenots::tda_core::{LevelSetDiagram, PersistenceDiagram, PointCloud};
use rand::RngExt;

/// A (birth, death, essential) triple used for diagram comparison.
pub type OraclePair = (f64, f64, bool);

/// Full-matrix persistence reduction over all simplices up to triangles.
/// No clearing, no union-find: the textbook algorithm.
pub fn brute_force_rips(dist: &DistanceMatrix, max_scale: f64) -> [Vec<OraclePair>; 2] {
    let n = dist.n();
    // (filtration, dim, vertices)
    let mut simplices: Vec<(f64, usize, Vec<usize>)> = Vec::new();
    for v in 0..n {
        simplices.push((0.0, 0, vec![v]));
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let w = dist.get(i, j);
            if w <= max_scale {
                simplices.push((w, 1, vec![i, j]));
            }
        }
    }
    for i in 0..n {
        for j in (i + 1)..n {
            for k in (j + 1)..n {
                let w = dist.get(i, j).max(dist.get(i, k)).max(dist.get(j, k));
                if w <= max_scale {
                    simplices.push((w, 2, vec![i, j, k]));
                }
            }
        }
    }
    simplices.sort_by(|a, b| {
        a.0.partial_cmp(&b.0)
            .unwrap()
            .then(a.1.cmp(&b.1))
            .then(a.2.cmp(&b.2))
    });

    let index_of = |verts: &[usize]| -> usize {
        simplices
            .iter()
            .position(|(_, _, v)| v.as_slice() == verts)
            .expect("face present")
    };

    let total = simplices.len();
    let mut columns: Vec<Vec<usize>> = Vec::with_capacity(total);
    for (_, dim, verts) in &simplices {
        let mut col = Vec::new();
        if *dim > 0 {
            for omit in 0..verts.len() {
                let mut face: Vec<usize> = verts.clone();
                face.remove(omit);
                col.push(index_of(&face));
            }
            col.sort_unstable();
        }
        columns.push(col);
    }

    let mut pivot_owner: Vec<Option<usize>> = vec![None; total];
    for j in 0..total {
        let mut col = columns[j].clone();
        while let Some(&low) = col.last() {
            match pivot_owner[low] {
                Some(owner) => {
                    let other = columns[owner].clone();
                    col = xor(&col, &other);
                }
                None => break,
            }
        }
        if let Some(&low) = col.last() {
            pivot_owner[low] = Some(j);
        }
        columns[j] = col;
    }

    let mut dgms: [Vec<OraclePair>; 2] = [Vec::new(), Vec::new()];
    let mut paired = vec![false; total];
    for low in 0..total {
        if let Some(owner) = pivot_owner[low] {
            paired[low] = true;
            paired[owner] = true;
            let (birth, dim, _) = &simplices[low];
            let death = simplices[owner].0;
            if death > *birth && *dim <= 1 {
                dgms[*dim].push((*birth, death, false));
            }
        }
    }
    // Positive simplices never killed are essential classes of their own
    // dimension; cap them at max_scale (triangles would be dim 2, skipped).
    for j in 0..total {
        if !paired[j] && columns[j].is_empty() {
            let (birth, dim, _) = &simplices[j];
            if *dim <= 1 && max_scale > *birth {
                dgms[*dim].push((*birth, max_scale, true));
            }
        }
    }
    for d in dgms.iter_mut() {
        sort_pairs(d);
    }
    dgms
}

fn xor(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::new();
    let (mut x, mut y) = (0, 0);
    while x < a.len() && y < b.len() {
        match a[x].cmp(&b[y]) {
            std::cmp::Ordering::Less => {
                out.push(a[x]);
                x += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[y]);
                y += 1;
            }
            std::cmp::Ordering::Equal => {
                x += 1;
                y += 1;
            }
        }
    }
    out.extend_from_slice(&a[x..]);
    out.extend_from_slice(&b[y..]);
    out
}

pub fn sort_pairs(pairs: &mut [OraclePair]) {
    pairs.sort_by(|a, b| {
        a.0.partial_cmp(&b.0)
            .unwrap()
            .then(a.1.partial_cmp(&b.1).unwrap())
            .then(a.2.cmp(&b.2))
    });
}

/// Library diagram as sortable oracle triples.
pub fn diagram_pairs(dgm: &PersistenceDiagram) -> Vec<OraclePair> {
    let mut out: Vec<OraclePair> = dgm
        .pairs
        .iter()
        .zip(&dgm.essential)
        .map(|(&(b, d), &e)| (b, d, e))
        .collect();
    sort_pairs(&mut out);
    out
}

/// Exhaustive minimum over all bijections (diagonal matches allowed) of
/// the maximum l-infinity displacement.
pub fn enumerate_bottleneck(a: &[(f64, f64)], b: &[(f64, f64)]) -> f64 {
    fn linf(p: (f64, f64), q: (f64, f64)) -> f64 {
        (p.0 - q.0).abs().max((p.1 - q.1).abs())
    }
    fn diag(p: (f64, f64)) -> f64 {
        (p.1 - p.0).abs() / 2.0
    }
    fn recurse(a: &[(f64, f64)], b: &[(f64, f64)], i: usize, used: &mut [bool], current: f64) -> f64 {
        if i == a.len() {
            let mut cost = current;
            for (j, &q) in b.iter().enumerate() {
                if !used[j] {
                    cost = cost.max(diag(q));
                }
            }
            return cost;
        }
        // Option 1: a[i] to the diagonal.
        let mut best = recurse(a, b, i + 1, used, current.max(diag(a[i])));
        // Option 2: a[i] to each unused b[j].
        for j in 0..b.len() {
            if !used[j] {
                used[j] = true;
                let c = recurse(a, b, i + 1, used, current.max(linf(a[i], b[j])));
                used[j] = false;
                best = best.min(c);
            }
        }
        best
    }
    let mut used = vec![false; b.len()];
    recurse(a, b, 0, &mut used, 0.0)
}

/// Threshold-sweep connected-components oracle for super-level-set
/// 0-dimensional persistence of a 1-D profile.
pub fn superlevel_sweep(values: &[f64]) -> LevelSetDiagram {
    let mut thresholds: Vec<f64> = values.to_vec();
    thresholds.sort_by(|a, b| b.partial_cmp(a).unwrap());
    thresholds.dedup();

    // Components are maximal runs of active cells; each carries its birth
    // value (the threshold at which it first appeared).
    let mut prev: Vec<(usize, usize, f64)> = Vec::new(); // (start, end inclusive, birth)
    let mut pairs: Vec<(f64, f64)> = Vec::new();
    for &h in &thresholds {
        let active: Vec<bool> = values.iter().map(|&v| v >= h).collect();
        let mut comps: Vec<(usize, usize)> = Vec::new();
        let mut start = None;
        for (i, &a) in active.iter().enumerate() {
            match (a, start) {
                (true, None) => start = Some(i),
                (false, Some(s)) => {
                    comps.push((s, i - 1));
                    start = None;
                }
                _ => {}
            }
        }
        if let Some(s) = start {
            comps.push((s, values.len() - 1));
        }

        let mut next: Vec<(usize, usize, f64)> = Vec::new();
        for &(s, e) in &comps {
            let members: Vec<&(usize, usize, f64)> = prev
                .iter()
                .filter(|&&(ps, pe, _)| ps >= s && pe <= e)
                .collect();
            if members.is_empty() {
                next.push((s, e, h));
            } else {
                let survivor_birth = members
                    .iter()
                    .map(|&&(_, _, b)| b)
                    .fold(f64::NEG_INFINITY, f64::max);
                // Every merged component except the (one) survivor dies at h.
                let mut survivor_used = false;
                for &&(_, _, b) in &members {
                    if b == survivor_birth && !survivor_used {
                        survivor_used = true;
                        continue;
                    }
                    if b > h {
                        pairs.push((b, h));
                    }
                }
                next.push((s, e, survivor_birth));
            }
        }
        prev = next;
    }
    let global_max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let global_min = values.iter().cloned().fold(f64::INFINITY, f64::min);
    LevelSetDiagram {
        pairs,
        essential: (global_max, global_min),
    }
}

/// Naive complete-linkage agglomeration recomputing every inter-cluster
/// distance from the original matrix at each step.
pub fn complete_linkage_oracle(dist: &DistanceMatrix) -> Vec<(usize, usize, f64)> {
    let n = dist.n();
    let mut clusters: Vec<(usize, Vec<usize>)> = (0..n).map(|i| (i, vec![i])).collect();
    let mut merges = Vec::new();
    for step in 0..n - 1 {
        let mut best: Option<(f64, usize, usize)> = None;
        for a in 0..clusters.len() {
            for b in (a + 1)..clusters.len() {
                let mut d = 0.0_f64;
                for &x in &clusters[a].1 {
                    for &y in &clusters[b].1 {
                        d = d.max(dist.get(x, y));
                    }
                }
                // Ties: lexicographically smallest (id_a, id_b); clusters
                // are kept ascending by id.
                if best.map_or(true, |(bd, _, _)| d < bd) {
                    best = Some((d, a, b));
                }
            }
        }
        let (height, a, b) = best.unwrap();
        let (id_b, members_b) = clusters.remove(b);
        let (id_a, mut members_a) = clusters.remove(a);
        merges.push((id_a, id_b, height));
        members_a.extend(members_b);
        members_a.sort_unstable();
        clusters.push((n + step, members_a));
    }
    merges
}

/// RMS misfit between two configurations after optimal rigid alignment
/// (rotation/reflection + translation).
pub fn procrustes_rms(reference: &[Vec<f64>], candidate: &[Vec<f64>]) -> f64 {
    use nalgebra::DMatrix;
    let n = reference.len();
    let d = reference[0].len();
    let center = |rows: &[Vec<f64>]| -> DMatrix<f64> {
        let mut m = DMatrix::zeros(n, d);
        for j in 0..d {
            let mean: f64 = rows.iter().map(|r| r[j]).sum::<f64>() / n as f64;
            for i in 0..n {
                m[(i, j)] = rows[i][j] - mean;
            }
        }
        m
    };
    let x = center(reference);
    let y = center(candidate);
    let svd = (y.transpose() * &x).svd(true, true);
    let rot = svd.u.unwrap() * svd.v_t.unwrap();
    let aligned = y * rot;
    let diff = aligned - x;
    (diff.iter().map(|v| v * v).sum::<f64>() / n as f64).sqrt()
}

/// Uniformly random point cloud in the unit cube.
pub fn random_cloud(n_points: usize, dim: usize, seed: u64) -> PointCloud {
    let mut rng = rng::chacha(seed);
    let rows: Vec<Vec<f64>> = (0..n_points)
        .map(|_| (0..dim).map(|_| rng.random::<f64>()).collect())
        .collect();
    PointCloud::from_rows(rows).unwrap()
}

/// Random diagram points above the diagonal with bounded persistence.
pub fn random_diagram_points(count: usize, seed: u64) -> Vec<(f64, f64)> {
    let mut rng = rng::chacha(seed);
    (0..count)
        .map(|_| {
            let b: f64 = rng.random::<f64>() * 2.0;
            let p: f64 = rng.random::<f64>() * 1.5;
            (b, b + p)
        })
        .collect()
}

/// Amplitude of the `freq_hz` component measured by projection over a
/// window that must hold an integer number of periods.
pub fn amplitude_at(values: &[f64], freq_hz: f64, fs: f64, start: usize, len: usize) -> f64 {
    let omega = 2.0 * std::f64::consts::PI * freq_hz / fs;
    let mut re = 0.0;
    let mut im = 0.0;
    for t in start..start + len {
        re += values[t] * (omega * t as f64).cos();
        im += values[t] * (omega * t as f64).sin();
    }
    2.0 * (re * re + im * im).sqrt() / len as f64
}
