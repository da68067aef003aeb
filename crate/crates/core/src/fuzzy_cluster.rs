//! Fuzzy c-medoids over a precomputed distance matrix, silhouette scoring
//! of hardened partitions, and silhouette-based selection of the cluster
//! count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

const MODULE: &str = "fuzzy_cluster";

/// Symmetric nonnegative distance matrix with a zero diagonal.
#[derive(Clone, Debug)]
pub struct DistanceMatrix {
    n: usize,
    values: Vec<f64>,
    labels: Vec<String>,
}

impl DistanceMatrix {
    /// Validates and wraps a row-major square matrix.
    pub fn new(n: usize, values: Vec<f64>, labels: Vec<String>) -> Result<DistanceMatrix> {
        if values.len() != n * n {
            return Err(Error::invalid(
                MODULE,
                format!("distance matrix needs {} entries, got {}", n * n, values.len()),
            ));
        }
        if !labels.is_empty() && labels.len() != n {
            return Err(Error::invalid(
                MODULE,
                format!("expected {} labels, got {}", n, labels.len()),
            ));
        }
        for i in 0..n {
            if values[i * n + i] != 0.0 {
                return Err(Error::invalid(MODULE, format!("nonzero diagonal at {i}")));
            }
            for j in (i + 1)..n {
                let d = values[i * n + j];
                if !d.is_finite() || d < 0.0 {
                    return Err(Error::invalid(
                        MODULE,
                        format!("invalid distance {d} at ({i},{j})"),
                    ));
                }
                if (d - values[j * n + i]).abs() > 1e-12 {
                    return Err(Error::invalid(MODULE, format!("asymmetric at ({i},{j})")));
                }
            }
        }
        let labels = if labels.is_empty() {
            (0..n).map(|i| i.to_string()).collect()
        } else {
            labels
        };
        Ok(DistanceMatrix { n, values, labels })
    }

    /// Builds a matrix by evaluating `f` on each unordered index pair.
    pub fn from_fn(
        n: usize,
        labels: Vec<String>,
        mut f: impl FnMut(usize, usize) -> f64,
    ) -> Result<DistanceMatrix> {
        let mut values = vec![0.0; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let d = f(i, j);
                values[i * n + j] = d;
                values[j * n + i] = d;
            }
        }
        DistanceMatrix::new(n, values, labels)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n + j]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }
}

/// Row-stochastic matrix of cluster membership degrees.
#[derive(Clone, Debug)]
pub struct MembershipMatrix {
    n: usize,
    k: usize,
    values: Vec<f64>,
}

impl MembershipMatrix {
    pub fn new(n: usize, k: usize, values: Vec<f64>) -> Result<MembershipMatrix> {
        if values.len() != n * k {
            return Err(Error::invalid(
                MODULE,
                format!("membership matrix needs {} entries, got {}", n * k, values.len()),
            ));
        }
        for i in 0..n {
            let row = &values[i * k..(i + 1) * k];
            if row.iter().any(|&u| u < 0.0 || !u.is_finite()) {
                return Err(Error::invalid(MODULE, format!("negative membership in row {i}")));
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > 1e-9 {
                return Err(Error::invalid(
                    MODULE,
                    format!("row {i} sums to {sum}, expected 1"),
                ));
            }
        }
        Ok(MembershipMatrix { n, k, values })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn get(&self, i: usize, c: usize) -> f64 {
        self.values[i * self.k + c]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.k..(i + 1) * self.k]
    }

    /// Hard labels by row argmax, ties broken toward the lower index.
    pub fn harden(&self) -> Vec<usize> {
        (0..self.n)
            .map(|i| {
                let row = self.row(i);
                let mut best = 0;
                for c in 1..self.k {
                    if row[c] > row[best] {
                        best = c;
                    }
                }
                best
            })
            .collect()
    }
}

/// A fitted fuzzy c-medoids model.
#[derive(Clone, Debug)]
pub struct FuzzyModel {
    pub medoid_indices: Vec<usize>,
    pub membership: MembershipMatrix,
    pub fuzziness: f64,
    pub objective: f64,
    /// Objective value after each iteration of the winning restart.
    pub objective_trace: Vec<f64>,
}

fn membership_exponent(m: f64) -> f64 {
    1.0 / (m - 1.0)
}

/// Membership update for fixed medoids: `u_ic` proportional to
/// `d(i, c)^(-1/(m-1))`, with a point at zero distance from a medoid
/// assigned wholly to the first such cluster.
fn update_memberships(dist: &DistanceMatrix, medoids: &[usize], m: f64) -> Vec<f64> {
    let n = dist.n();
    let k = medoids.len();
    let e = membership_exponent(m);
    let mut u = vec![0.0; n * k];
    for i in 0..n {
        let row = &mut u[i * k..(i + 1) * k];
        if let Some(c0) = medoids.iter().position(|&mi| dist.get(i, mi) == 0.0) {
            row[c0] = 1.0;
            continue;
        }
        for c in 0..k {
            let dc = dist.get(i, medoids[c]);
            let mut denom = 0.0;
            for &mj in medoids {
                denom += (dc / dist.get(i, mj)).powf(e);
            }
            row[c] = 1.0 / denom;
        }
        let sum: f64 = row.iter().sum();
        for v in row.iter_mut() {
            *v /= sum;
        }
    }
    u
}

/// Medoid update for fixed memberships: each cluster takes the point
/// minimizing the weighted distance sum, ties toward the lower index.
/// A point already claimed by an earlier cluster in the same sweep is
/// skipped so the medoid set stays distinct.
fn update_medoids(dist: &DistanceMatrix, u: &[f64], k: usize, m: f64) -> Vec<usize> {
    let n = dist.n();
    let mut taken = vec![false; n];
    let mut medoids = Vec::with_capacity(k);
    for c in 0..k {
        let mut best: Option<(f64, usize)> = None;
        for x in 0..n {
            if taken[x] {
                continue;
            }
            let mut cost = 0.0;
            for i in 0..n {
                cost += u[i * k + c].powf(m) * dist.get(i, x);
            }
            match best {
                Some((bc, _)) if cost >= bc => {}
                _ => best = Some((cost, x)),
            }
        }
        let (_, x) = best.expect("k <= n leaves a free point per cluster");
        taken[x] = true;
        medoids.push(x);
    }
    medoids
}

fn objective(dist: &DistanceMatrix, u: &[f64], medoids: &[usize], m: f64) -> f64 {
    let n = dist.n();
    let k = medoids.len();
    let mut total = 0.0;
    for i in 0..n {
        for c in 0..k {
            total += u[i * k + c].powf(m) * dist.get(i, medoids[c]);
        }
    }
    total
}

/// Per-restart seed derivation; keeps restarts independent of scheduling.
fn restart_seed(seed: u64, restart: u64) -> u64 {
    seed ^ (restart.wrapping_add(1)).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// Fuzzy c-medoids by alternating membership and medoid updates.
///
/// Each restart draws `k` distinct starting medoids from a seeded
/// generator and iterates until the medoid set repeats or `max_iter` is
/// reached; the best objective over restarts wins, ties going to the
/// earlier restart.
pub fn fuzzy_c_medoids(
    dist: &DistanceMatrix,
    k: usize,
    m: f64,
    restarts: usize,
    max_iter: usize,
    seed: u64,
) -> Result<FuzzyModel> {
    let n = dist.n();
    if k < 2 || k > n {
        return Err(Error::invalid(
            MODULE,
            format!("cluster count {k} must lie in [2, {n}]"),
        ));
    }
    if m <= 1.0 || !m.is_finite() {
        return Err(Error::invalid(MODULE, format!("fuzziness must exceed 1, got {m}")));
    }
    if restarts == 0 || max_iter == 0 {
        return Err(Error::invalid(MODULE, "restarts and max_iter must be positive"));
    }
    let has_spread = (0..n).any(|i| (0..n).any(|j| dist.get(i, j) > 0.0));
    if !has_spread {
        return Err(Error::degenerate(MODULE, "all points are identical"));
    }

    let mut best: Option<FuzzyModel> = None;
    for r in 0..restarts {
        let mut rng = ChaCha8Rng::seed_from_u64(restart_seed(seed, r as u64));
        let mut medoids = rand::seq::index::sample(&mut rng, n, k).into_vec();
        medoids.sort_unstable();

        let mut trace = Vec::new();
        let mut u = update_memberships(dist, &medoids, m);
        let mut obj = objective(dist, &u, &medoids, m);
        trace.push(obj);
        for _ in 0..max_iter {
            let next = update_medoids(dist, &u, k, m);
            let unchanged = next == medoids;
            medoids = next;
            u = update_memberships(dist, &medoids, m);
            let next_obj = objective(dist, &u, &medoids, m);
            debug_assert!(next_obj <= obj + 1e-12, "objective rose: {obj} -> {next_obj}");
            obj = next_obj;
            trace.push(obj);
            if unchanged {
                break;
            }
        }

        if best.as_ref().map_or(true, |b| obj < b.objective) {
            best = Some(FuzzyModel {
                medoid_indices: medoids,
                membership: MembershipMatrix::new(n, k, u)?,
                fuzziness: m,
                objective: obj,
                objective_trace: trace,
            });
        }
    }
    Ok(best.expect("at least one restart"))
}

/// Mean silhouette of a hard partition. Singleton clusters contribute 0.
pub fn silhouette(dist: &DistanceMatrix, labels: &[usize]) -> Result<f64> {
    let n = dist.n();
    if labels.len() != n {
        return Err(Error::invalid(
            MODULE,
            format!("expected {} labels, got {}", n, labels.len()),
        ));
    }
    let mut clusters: Vec<usize> = labels.to_vec();
    clusters.sort_unstable();
    clusters.dedup();
    if clusters.len() < 2 {
        return Err(Error::invalid(MODULE, "silhouette needs at least two clusters"));
    }

    let mut total = 0.0;
    for i in 0..n {
        let own = labels[i];
        let own_size = labels.iter().filter(|&&l| l == own).count();
        if own_size == 1 {
            continue; // scores 0
        }
        let mut a = 0.0;
        for j in 0..n {
            if j != i && labels[j] == own {
                a += dist.get(i, j);
            }
        }
        a /= (own_size - 1) as f64;

        let mut b = f64::INFINITY;
        for &c in &clusters {
            if c == own {
                continue;
            }
            let mut sum = 0.0;
            let mut count = 0usize;
            for j in 0..n {
                if labels[j] == c {
                    sum += dist.get(i, j);
                    count += 1;
                }
            }
            b = b.min(sum / count as f64);
        }

        let denom = a.max(b);
        if denom > 0.0 {
            total += (b - a) / denom;
        }
    }
    Ok(total / n as f64)
}

/// Result of silhouette-based selection of the cluster count.
#[derive(Clone, Debug)]
pub struct SelectedK {
    pub k: usize,
    /// Silhouette score per candidate count, in ascending candidate order.
    pub scores: Vec<(usize, f64)>,
}

/// Runs fuzzy c-medoids for every candidate count, hardens the
/// memberships, and returns the count with the highest silhouette
/// (ties toward the smaller count).
pub fn select_k(
    dist: &DistanceMatrix,
    k_lo: usize,
    k_hi: usize,
    m: f64,
    restarts: usize,
    max_iter: usize,
    seed: u64,
) -> Result<SelectedK> {
    let n = dist.n();
    if k_lo < 2 || k_hi < k_lo || k_hi > n.saturating_sub(1) {
        return Err(Error::invalid(
            MODULE,
            format!("candidate range [{k_lo}, {k_hi}] must lie within [2, {}]", n - 1),
        ));
    }
    let mut scores = Vec::new();
    let mut best: Option<(usize, f64)> = None;
    for k in k_lo..=k_hi {
        let model = fuzzy_c_medoids(dist, k, m, restarts, max_iter, seed)?;
        let labels = model.membership.harden();
        let score = silhouette(dist, &labels)?;
        scores.push((k, score));
        if best.map_or(true, |(_, s)| score > s) {
            best = Some((k, score));
        }
    }
    let (k, _) = best.expect("non-empty candidate range");
    Ok(SelectedK { k, scores })
}
