//! Hierarchical clustering over a distance matrix, dendrogram cutting,
//! classical multidimensional scaling, and per-cluster summary tables.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::fuzzy_cluster::DistanceMatrix;

const MODULE: &str = "cluster_downstream";

/// One agglomeration step. Cluster ids follow merge order: leaves are
/// `0..n`, the i-th merge creates id `n + i`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Merge {
    pub a: usize,
    pub b: usize,
    pub height: f64,
}

/// A stepwise dendrogram of `n_leaves - 1` merges.
#[derive(Clone, Debug)]
pub struct Dendrogram {
    pub n_leaves: usize,
    pub merges: Vec<Merge>,
}

/// Agglomerative clustering with the maximum pairwise linkage. Ties pick
/// the lexicographically smallest pair of cluster ids.
pub fn complete_linkage(dist: &DistanceMatrix) -> Result<Dendrogram> {
    let n = dist.n();
    if n < 2 {
        return Err(Error::invalid(MODULE, "need at least 2 observations"));
    }
    // Active clusters kept ascending by id so that scanning i < j visits
    // pairs in lexicographic order and ties resolve to the smallest pair.
    let mut ids: Vec<usize> = (0..n).collect();
    let mut d: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| dist.get(i, j)).collect())
        .collect();
    let mut merges = Vec::with_capacity(n - 1);

    for step in 0..n - 1 {
        let k = ids.len();
        let (mut bi, mut bj) = (0, 1);
        let mut best = f64::INFINITY;
        for i in 0..k {
            for j in (i + 1)..k {
                if d[i][j] < best {
                    best = d[i][j];
                    bi = i;
                    bj = j;
                }
            }
        }
        merges.push(Merge {
            a: ids[bi],
            b: ids[bj],
            height: best,
        });
        // Complete linkage: the merged cluster sits at the max of the two
        // distances to every other cluster.
        let merged: Vec<f64> = (0..k)
            .filter(|&t| t != bi && t != bj)
            .map(|t| d[bi][t].max(d[bj][t]))
            .collect();
        // Drop both constituents and append the merged cluster; the new id
        // n + step is the largest so far, keeping `ids` sorted.
        d.remove(bj);
        d.remove(bi);
        for row in d.iter_mut() {
            row.remove(bj);
            row.remove(bi);
        }
        for (row, &v) in d.iter_mut().zip(&merged) {
            row.push(v);
        }
        let mut new_row = merged;
        new_row.push(0.0);
        d.push(new_row);
        ids.remove(bj);
        ids.remove(bi);
        ids.push(n + step);
    }
    Ok(Dendrogram {
        n_leaves: n,
        merges,
    })
}

/// How to slice a dendrogram into flat clusters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum CutCriterion {
    /// Keep merges with height <= the threshold.
    Height(f64),
    /// Ask for exactly this many clusters; with tied heights the nearest
    /// attainable count above it is used.
    Count(usize),
}

/// Flat cluster labels from a dendrogram cut. Clusters are numbered in
/// order of their smallest leaf index.
pub fn cut(dendro: &Dendrogram, criterion: CutCriterion) -> Result<Vec<usize>> {
    let n = dendro.n_leaves;
    let applied = match criterion {
        CutCriterion::Height(h) => dendro.merges.iter().take_while(|m| m.height <= h).count(),
        CutCriterion::Count(k) => {
            if k == 0 || k > n {
                return Err(Error::invalid(
                    MODULE,
                    format!("cannot cut {n} leaves into {k} clusters"),
                ));
            }
            // Applying a prefix of merges only up to a height boundary:
            // attainable counts are n minus the prefix lengths at distinct
            // heights. Pick k if attainable, else the closest count above.
            let mut applied = n - k;
            while applied > 0
                && applied < dendro.merges.len()
                && dendro.merges[applied].height == dendro.merges[applied - 1].height
            {
                applied -= 1;
            }
            applied
        }
    };

    let mut parent: Vec<usize> = (0..2 * n - 1).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for (i, m) in dendro.merges.iter().take(applied).enumerate() {
        let node = n + i;
        let ra = find(&mut parent, m.a);
        let rb = find(&mut parent, m.b);
        parent[ra] = node;
        parent[rb] = node;
    }

    let mut label_of_root: Vec<Option<usize>> = vec![None; 2 * n - 1];
    let mut next = 0;
    let mut labels = vec![0; n];
    for leaf in 0..n {
        let root = find(&mut parent, leaf);
        let label = *label_of_root[root].get_or_insert_with(|| {
            let l = next;
            next += 1;
            l
        });
        labels[leaf] = label;
    }
    Ok(labels)
}

/// Classical MDS configuration and its eigenvalue diagnostics.
#[derive(Clone, Debug)]
pub struct MdsResult {
    /// One row of `dims` coordinates per observation.
    pub coordinates: Vec<Vec<f64>>,
    /// All eigenvalues of the double-centered matrix, descending.
    pub eigenvalues: Vec<f64>,
    /// True when a selected eigenvalue was negative and truncated to zero.
    pub truncated: bool,
}

/// Classical multidimensional scaling: eigendecomposition of the
/// double-centered squared-distance matrix, coordinates from the top
/// nonnegative eigenvalues.
pub fn classical_mds(dist: &DistanceMatrix, dims: usize) -> Result<MdsResult> {
    let n = dist.n();
    if dims == 0 || dims > n.saturating_sub(1) {
        return Err(Error::invalid(
            MODULE,
            format!("dims {dims} must lie in [1, {}]", n - 1),
        ));
    }
    let mut b = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let d = dist.get(i, j);
            b[(i, j)] = -0.5 * d * d;
        }
    }
    // Double centering.
    let row_means: Vec<f64> = (0..n).map(|i| b.row(i).sum() / n as f64).collect();
    let grand = row_means.iter().sum::<f64>() / n as f64;
    for i in 0..n {
        for j in 0..n {
            b[(i, j)] += grand - row_means[i] - row_means[j];
        }
    }
    let eigen = nalgebra::SymmetricEigen::new(b);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| {
        eigen.eigenvalues[y]
            .partial_cmp(&eigen.eigenvalues[x])
            .unwrap()
            .then(x.cmp(&y))
    });
    let eigenvalues: Vec<f64> = order.iter().map(|&i| eigen.eigenvalues[i]).collect();

    let mut truncated = false;
    let mut coordinates = vec![vec![0.0; dims]; n];
    for (out_j, &src) in order.iter().take(dims).enumerate() {
        let lambda = eigen.eigenvalues[src];
        let scale = if lambda > 0.0 {
            lambda.sqrt()
        } else {
            if lambda < 0.0 {
                truncated = true;
            }
            0.0
        };
        // Deterministic sign: largest-magnitude component positive.
        let col = eigen.eigenvectors.column(src);
        let mut flip = 1.0;
        let mut best = 0.0;
        for i in 0..n {
            if col[i].abs() > best {
                best = col[i].abs();
                flip = if col[i] < 0.0 { -1.0 } else { 1.0 };
            }
        }
        for i in 0..n {
            coordinates[i][out_j] = flip * col[i] * scale;
        }
    }
    Ok(MdsResult {
        coordinates,
        eigenvalues,
        truncated,
    })
}

/// Per-cluster aggregate of subject-level periodicity statistics and an
/// external severity score.
#[derive(Clone, Debug)]
pub struct ClusterStat {
    pub label: usize,
    pub count: usize,
    /// Mean and SD over subjects of the per-subject mean score.
    pub score_mean: f64,
    pub score_sd: f64,
    /// Mean and SD over subjects of the per-subject frame SD.
    pub frame_sd_mean: f64,
    pub frame_sd_sd: f64,
    pub severity_mean: f64,
    pub severity_sd: f64,
}

#[derive(Clone, Debug)]
pub struct ClusterSummary {
    pub clusters: Vec<ClusterStat>,
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Sample standard deviation (n - 1 denominator); 0 for a single value.
fn sample_sd(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean(xs);
    (xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() - 1) as f64).sqrt()
}

/// Aggregates per-subject profiles into per-cluster statistics: each
/// subject is reduced to the mean and SD of its profile, then clusters
/// report the mean and SD of those quantities and of the severity score.
pub fn summarize_clusters(
    labels: &[usize],
    profiles: &[Vec<f64>],
    severity: &[f64],
) -> Result<ClusterSummary> {
    let n = labels.len();
    if profiles.len() != n || severity.len() != n {
        return Err(Error::invalid(
            MODULE,
            format!(
                "misaligned inputs: {} labels, {} profiles, {} severity scores",
                n,
                profiles.len(),
                severity.len()
            ),
        ));
    }
    if profiles.iter().any(|p| p.is_empty()) {
        return Err(Error::invalid(MODULE, "empty profile"));
    }
    let subject_means: Vec<f64> = profiles.iter().map(|p| mean(p)).collect();
    let subject_sds: Vec<f64> = profiles.iter().map(|p| sample_sd(p)).collect();

    let mut labels_sorted: Vec<usize> = labels.to_vec();
    labels_sorted.sort_unstable();
    labels_sorted.dedup();

    let mut clusters = Vec::new();
    for &label in &labels_sorted {
        let idx: Vec<usize> = (0..n).filter(|&i| labels[i] == label).collect();
        let ms: Vec<f64> = idx.iter().map(|&i| subject_means[i]).collect();
        let sds: Vec<f64> = idx.iter().map(|&i| subject_sds[i]).collect();
        let sev: Vec<f64> = idx.iter().map(|&i| severity[i]).collect();
        clusters.push(ClusterStat {
            label,
            count: idx.len(),
            score_mean: mean(&ms),
            score_sd: sample_sd(&ms),
            frame_sd_mean: mean(&sds),
            frame_sd_sd: sample_sd(&sds),
            severity_mean: mean(&sev),
            severity_sd: sample_sd(&sev),
        });
    }
    Ok(ClusterSummary { clusters })
}
