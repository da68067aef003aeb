//! Super-level-set 0-dimensional persistence of a discretized profile.

use crate::error::{Error, Result};

use super::diagram::LevelSetDiagram;

const MODULE: &str = "tda_core";

/// Sweeps the threshold downward over `{x : f(x) >= h}`. A component is
/// born at each local maximum; when two components meet at a local
/// minimum, the one born at the lower peak dies, yielding the pair
/// (peak value, merge value). Adjacent equal values collapse into one
/// critical point, so zero-persistence pairs never appear. The last
/// component forms the essential pair (global max, global min).
pub fn superlevel_persistence_0d(values: &[f64]) -> Result<LevelSetDiagram> {
    if values.is_empty() {
        return Err(Error::invalid(MODULE, "profile must be non-empty"));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid(MODULE, "profile must be finite"));
    }
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    // Descending by value; ties activate left to right so plateaus join
    // their earlier cells without spawning components.
    order.sort_by(|&a, &b| values[b].partial_cmp(&values[a]).unwrap().then(a.cmp(&b)));

    // Union-find where each root remembers the value of its peak.
    let mut parent: Vec<usize> = (0..n).collect();
    let mut birth = vec![f64::NEG_INFINITY; n];
    let mut active = vec![false; n];

    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }

    let mut pairs = Vec::new();
    for &i in &order {
        let v = values[i];
        active[i] = true;
        birth[i] = v;
        let left = (i > 0 && active[i - 1]).then(|| find(&mut parent, i - 1));
        let right = (i + 1 < n && active[i + 1]).then(|| find(&mut parent, i + 1));
        match (left, right) {
            (None, None) => {}
            (Some(r), None) | (None, Some(r)) => {
                parent[i] = r;
            }
            (Some(rl), Some(rr)) => {
                // Two components merge at a local minimum; the one with the
                // lower peak dies. Equal peaks keep the left one alive.
                let (survivor, loser) = if birth[rl] >= birth[rr] {
                    (rl, rr)
                } else {
                    (rr, rl)
                };
                if birth[loser] > v {
                    pairs.push((birth[loser], v));
                }
                parent[loser] = survivor;
                parent[i] = survivor;
            }
        }
    }

    let global_max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let global_min = values.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok(LevelSetDiagram {
        pairs,
        essential: (global_max, global_min),
    })
}
