//! Topological analysis of time series: sliding-window embeddings,
//! Vietoris-Rips persistence in dimensions 0 and 1, periodicity scoring,
//! super-level-set 0-dimensional persistence of discretized profiles, and
//! the bottleneck distance between diagrams.

mod bottleneck;
mod diagram;
mod rips;
mod superlevel;

pub use bottleneck::{bottleneck_distance, bottleneck_distance_levelset, points_bottleneck};
pub use diagram::{periodicity_score, LevelSetDiagram, PersistenceDiagram};
pub use rips::rips_persistence;
pub use superlevel::superlevel_persistence_0d;

use rand::RngExt;

use crate::error::{Error, Result};
use crate::fuzzy_cluster::DistanceMatrix;
use crate::rng;
use crate::tsfeatures::acf_values;

const MODULE: &str = "tda_core";

/// Sliding-window embedding parameters: dimension `p` (the embedding maps
/// into `p + 1` coordinates), delay `tau` in samples, and the number of
/// embedded points `n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EmbeddingConfig {
    pub dimension: usize,
    pub delay: usize,
    pub points: usize,
}

impl EmbeddingConfig {
    pub fn new(dimension: usize, delay: usize, points: usize) -> Result<EmbeddingConfig> {
        if dimension == 0 || delay == 0 || points == 0 {
            return Err(Error::invalid(
                MODULE,
                "embedding dimension, delay, and point count must be positive",
            ));
        }
        Ok(EmbeddingConfig {
            dimension,
            delay,
            points,
        })
    }

    /// Samples consumed by one embedded point: `p * tau + 1`.
    pub fn window_samples(&self) -> usize {
        self.dimension * self.delay + 1
    }
}

/// A real matrix of points, one per row.
#[derive(Clone, Debug, PartialEq)]
pub struct PointCloud {
    data: Vec<f64>,
    rows: usize,
    cols: usize,
}

impl PointCloud {
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<PointCloud> {
        if rows.is_empty() {
            return Err(Error::invalid(MODULE, "point cloud must be non-empty"));
        }
        let cols = rows[0].len();
        if cols == 0 {
            return Err(Error::invalid(MODULE, "points must have at least one coordinate"));
        }
        let mut data = Vec::with_capacity(rows.len() * cols);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != cols {
                return Err(Error::invalid(MODULE, format!("ragged row at {i}")));
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(Error::invalid(MODULE, format!("non-finite coordinate in row {i}")));
            }
            data.extend_from_slice(row);
        }
        Ok(PointCloud {
            data,
            rows: rows.len(),
            cols,
        })
    }

    pub(crate) fn from_flat(data: Vec<f64>, rows: usize, cols: usize) -> PointCloud {
        debug_assert_eq!(data.len(), rows * cols);
        PointCloud { data, rows, cols }
    }

    pub fn n_points(&self) -> usize {
        self.rows
    }

    pub fn dim(&self) -> usize {
        self.cols
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn iter_points(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.cols)
    }

    /// Euclidean distance matrix over the points.
    pub fn distance_matrix(&self) -> DistanceMatrix {
        DistanceMatrix::from_fn(self.rows, Vec::new(), |i, j| {
            euclidean(self.point(i), self.point(j))
        })
        .expect("euclidean distances are valid")
    }
}

pub(crate) fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Delay embedding: row `i` is `[x_i, x_{i+tau}, ..., x_{i+p*tau}]` for
/// `i` in `0..n`.
pub fn sliding_window_embed(series: &[f64], cfg: &EmbeddingConfig) -> Result<PointCloud> {
    let needed = cfg.points + cfg.dimension * cfg.delay;
    if series.len() < needed {
        return Err(Error::invalid(
            MODULE,
            format!(
                "series of {} samples is too short for {} points of window {} (needs {})",
                series.len(),
                cfg.points,
                cfg.window_samples(),
                needed
            ),
        ));
    }
    let cols = cfg.dimension + 1;
    let mut data = Vec::with_capacity(cfg.points * cols);
    for i in 0..cfg.points {
        for j in 0..cols {
            data.push(series[i + j * cfg.delay]);
        }
    }
    Ok(PointCloud::from_flat(data, cfg.points, cols))
}

/// Delay selection from the autocorrelation: the smallest lag whose |ACF|
/// drops below the `2/sqrt(T)` noise band, or failing that the lag with
/// the smallest nonzero |ACF|.
pub fn select_delay(series: &[f64], max_lag: usize) -> Result<usize> {
    let rho = acf_values(series, max_lag)?;
    let band = 2.0 / (series.len() as f64).sqrt();
    for (idx, &r) in rho.iter().enumerate() {
        if r.abs() < band {
            return Ok(idx + 1);
        }
    }
    let mut best: Option<(f64, usize)> = None;
    for (idx, &r) in rho.iter().enumerate() {
        let a = r.abs();
        if a > 0.0 && best.map_or(true, |(ba, _)| a < ba) {
            best = Some((a, idx + 1));
        }
    }
    best.map(|(_, lag)| lag).ok_or_else(|| {
        Error::degenerate(MODULE, "autocorrelation is identically zero at every lag")
    })
}

/// Pointwise standardization: each row is centered on its own coordinate
/// mean and scaled to unit norm. Rows with no variation map to the zero
/// vector; the returned mask marks them.
pub fn standardize_cloud(cloud: &PointCloud) -> (PointCloud, Vec<bool>) {
    let cols = cloud.dim();
    let mut data = Vec::with_capacity(cloud.n_points() * cols);
    let mut degenerate = Vec::with_capacity(cloud.n_points());
    for row in cloud.iter_points() {
        let mean = row.iter().sum::<f64>() / cols as f64;
        let centered: Vec<f64> = row.iter().map(|v| v - mean).collect();
        let norm = centered.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm < 1e-300 {
            data.extend(std::iter::repeat(0.0).take(cols));
            degenerate.push(true);
        } else {
            data.extend(centered.iter().map(|v| v / norm));
            degenerate.push(false);
        }
    }
    (
        PointCloud::from_flat(data, cloud.n_points(), cols),
        degenerate,
    )
}

/// Projection onto the top `k` principal components of the column-centered
/// cloud, components ordered by decreasing singular value and signed so the
/// largest-magnitude loading is positive.
pub fn pca_reduce(cloud: &PointCloud, k: usize) -> Result<PointCloud> {
    let d = cloud.dim();
    let n = cloud.n_points();
    if k == 0 || k > d {
        return Err(Error::invalid(
            MODULE,
            format!("component count {k} must lie in [1, {d}]"),
        ));
    }
    let mut mat = nalgebra::DMatrix::<f64>::zeros(n, d);
    for (i, row) in cloud.iter_points().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            mat[(i, j)] = v;
        }
    }
    for j in 0..d {
        let mean = mat.column(j).sum() / n as f64;
        for i in 0..n {
            mat[(i, j)] -= mean;
        }
    }
    let svd = mat.svd(true, true);
    let u = svd.u.as_ref().expect("u requested");
    let vt = svd.v_t.as_ref().expect("v_t requested");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| {
        svd.singular_values[b]
            .partial_cmp(&svd.singular_values[a])
            .unwrap()
            .then(a.cmp(&b))
    });

    let mut data = vec![0.0; n * k];
    for (out_j, &src) in order.iter().take(k).enumerate() {
        let sigma = svd.singular_values[src];
        // Sign convention: largest-magnitude loading positive.
        let mut flip = 1.0;
        let mut best = 0.0;
        for j in 0..d {
            let v = vt[(src, j)];
            if v.abs() > best {
                best = v.abs();
                flip = if v < 0.0 { -1.0 } else { 1.0 };
            }
        }
        for i in 0..n {
            data[i * k + out_j] = flip * u[(i, src)] * sigma;
        }
    }
    Ok(PointCloud::from_flat(data, n, k))
}

/// Greedy maxmin landmark selection. The first landmark is drawn uniformly
/// from the seeded stream; each following landmark maximizes the distance
/// to the chosen set, ties toward the lower index.
pub fn maxmin_landmarks(cloud: &PointCloud, count: usize, seed: u64) -> Vec<usize> {
    let n = cloud.n_points();
    if count >= n {
        return (0..n).collect();
    }
    if count == 0 {
        return Vec::new();
    }
    let mut rng = rng::chacha(seed);
    let first = rng.random_range(0..n);
    let mut chosen = Vec::with_capacity(count);
    chosen.push(first);
    let mut min_dist: Vec<f64> = (0..n)
        .map(|i| euclidean(cloud.point(i), cloud.point(first)))
        .collect();
    while chosen.len() < count {
        let mut best = 0;
        for i in 1..n {
            if min_dist[i] > min_dist[best] {
                best = i;
            }
        }
        chosen.push(best);
        for i in 0..n {
            let d = euclidean(cloud.point(i), cloud.point(best));
            if d < min_dist[i] {
                min_dist[i] = d;
            }
        }
    }
    chosen
}

/// Restricts a cloud to the given row indices, preserving order.
pub fn subsample_cloud(cloud: &PointCloud, indices: &[usize]) -> PointCloud {
    let cols = cloud.dim();
    let mut data = Vec::with_capacity(indices.len() * cols);
    for &i in indices {
        data.extend_from_slice(cloud.point(i));
    }
    PointCloud::from_flat(data, indices.len(), cols)
}
