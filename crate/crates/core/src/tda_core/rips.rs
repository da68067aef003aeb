//! Vietoris-Rips persistent homology in dimensions 0 and 1.
//!
//! The filtration parameter is the edge length (diameter convention): a
//! simplex enters once all of its pairwise distances are within the scale.
//! Dimension 0 comes from a union-find sweep over the sorted edges (elder
//! rule, ties toward the lower component index); dimension 1 from the
//! standard column reduction of the triangle boundary matrix over Z/2.
//! Zero-persistence pairs are dropped. Classes alive at `max_scale` are
//! reported with the cap as their death and flagged essential.

use crate::error::{Error, Result};
use crate::fuzzy_cluster::DistanceMatrix;

use super::diagram::PersistenceDiagram;

const MODULE: &str = "tda_core";

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> UnionFind {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Merges so the smaller root index survives; returns the dying root.
    fn union(&mut self, a: usize, b: usize) -> Option<usize> {
        let ra = self.find(a);
        let rb = self.find(b);
        if ra == rb {
            return None;
        }
        let (keep, die) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[die] = keep;
        Some(die)
    }
}

#[derive(Clone, Copy)]
struct Edge {
    weight: f64,
    i: usize,
    j: usize,
}

/// Rips persistence diagrams for dimensions `0..=max_dim` (`max_dim` in
/// {0, 1}) of the filtration truncated at `max_scale`.
pub fn rips_persistence(
    dist: &DistanceMatrix,
    max_dim: usize,
    max_scale: f64,
) -> Result<Vec<PersistenceDiagram>> {
    if max_dim > 1 {
        return Err(Error::invalid(
            MODULE,
            format!("only dimensions 0 and 1 are supported, got {max_dim}"),
        ));
    }
    if !(max_scale > 0.0) || !max_scale.is_finite() {
        return Err(Error::invalid(
            MODULE,
            format!("max scale must be positive and finite, got {max_scale}"),
        ));
    }
    let n = dist.n();

    let mut edges: Vec<Edge> = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let w = dist.get(i, j);
            if w <= max_scale {
                edges.push(Edge { weight: w, i, j });
            }
        }
    }
    edges.sort_by(|a, b| {
        a.weight
            .partial_cmp(&b.weight)
            .unwrap()
            .then(a.i.cmp(&b.i))
            .then(a.j.cmp(&b.j))
    });

    // Dimension 0: each merging edge kills the younger component. All
    // vertices are born at 0, so a merge at weight w yields the pair (0, w).
    let mut uf = UnionFind::new(n);
    let mut dim0_pairs = Vec::new();
    let mut dim0_flags = Vec::new();
    let mut merging = vec![false; edges.len()];
    for (e_idx, e) in edges.iter().enumerate() {
        if uf.union(e.i, e.j).is_some() {
            merging[e_idx] = true;
            if e.weight > 0.0 {
                dim0_pairs.push((0.0, e.weight));
                dim0_flags.push(false);
            }
        }
    }
    // Surviving components are essential, capped at max_scale.
    let mut roots: Vec<usize> = (0..n).map(|v| uf.find(v)).collect();
    roots.sort_unstable();
    roots.dedup();
    for _ in &roots {
        dim0_pairs.push((0.0, max_scale));
        dim0_flags.push(true);
    }
    let mut diagrams = vec![PersistenceDiagram::new(0, dim0_pairs, dim0_flags)?];

    if max_dim == 1 {
        diagrams.push(rips_dim1(dist, &edges, &merging, max_scale)?);
    }
    Ok(diagrams)
}

fn rips_dim1(
    dist: &DistanceMatrix,
    edges: &[Edge],
    merging: &[bool],
    max_scale: f64,
) -> Result<PersistenceDiagram> {
    let n = dist.n();
    let m = edges.len();

    // Edge rank lookup: the position of each edge in the sorted order is
    // its row index in the boundary matrix.
    let mut edge_rank = vec![usize::MAX; n * n];
    for (r, e) in edges.iter().enumerate() {
        edge_rank[e.i * n + e.j] = r;
    }
    let rank = |a: usize, b: usize| -> usize {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        edge_rank[lo * n + hi]
    };

    // Triangles with filtration (max edge weight) within the cap, sorted by
    // (filtration, vertex triple) for a deterministic reduction order.
    let mut triangles: Vec<(f64, usize, usize, usize)> = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let dij = dist.get(i, j);
            if dij > max_scale {
                continue;
            }
            for k in (j + 1)..n {
                let dik = dist.get(i, k);
                let djk = dist.get(j, k);
                let f = dij.max(dik).max(djk);
                if f <= max_scale {
                    triangles.push((f, i, j, k));
                }
            }
        }
    }
    triangles.sort_by(|a, b| {
        a.0.partial_cmp(&b.0)
            .unwrap()
            .then(a.1.cmp(&b.1))
            .then(a.2.cmp(&b.2))
            .then(a.3.cmp(&b.3))
    });

    // Column reduction over Z/2. Columns are triangle boundaries (three
    // edge ranks, sorted ascending); the pivot is the largest rank.
    let mut pivot_col: Vec<usize> = vec![usize::MAX; m];
    let mut stored: Vec<Vec<usize>> = Vec::new();
    let mut paired_death: Vec<Option<f64>> = vec![None; m];

    for &(f, i, j, k) in &triangles {
        let mut col = vec![rank(i, j), rank(i, k), rank(j, k)];
        col.sort_unstable();
        loop {
            let Some(&low) = col.last() else { break };
            let owner = pivot_col[low];
            if owner == usize::MAX {
                pivot_col[low] = stored.len();
                paired_death[low] = Some(f);
                stored.push(col);
                break;
            }
            col = xor_sorted(&col, &stored[owner]);
        }
    }

    let mut pairs = Vec::new();
    let mut flags = Vec::new();
    for (r, e) in edges.iter().enumerate() {
        if merging[r] {
            continue; // edge pays for a dim-0 death, not a cycle birth
        }
        match paired_death[r] {
            Some(death) => {
                if death > e.weight {
                    pairs.push((e.weight, death));
                    flags.push(false);
                }
            }
            None => {
                if max_scale > e.weight {
                    pairs.push((e.weight, max_scale));
                    flags.push(true);
                }
            }
        }
    }
    PersistenceDiagram::new(1, pairs, flags)
}

/// Symmetric difference of two ascending index lists.
fn xor_sorted(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(a.len() + b.len());
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
