//! Bottleneck distance between persistence diagrams.
//!
//! The distance is the smallest threshold `t` for which a perfect matching
//! exists between the two diagrams augmented with diagonal projections,
//! where a point may match a point of the other diagram within l-infinity
//! distance `t` or its own diagonal projection within `t`. The optimum is
//! always attained at one of finitely many candidate costs, so a binary
//! search over the sorted candidates with a matching feasibility test is
//! exact.

use crate::error::{Error, Result};

use super::diagram::{LevelSetDiagram, PersistenceDiagram};

const MODULE: &str = "tda_core";

fn linf(a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - b.0).abs().max((a.1 - b.1).abs())
}

fn diagonal_cost(p: (f64, f64)) -> f64 {
    (p.1 - p.0).abs() / 2.0
}

/// Bottleneck distance between two bare point sets in the (birth, death)
/// half-plane, diagonal matches allowed.
pub fn points_bottleneck(a: &[(f64, f64)], b: &[(f64, f64)]) -> f64 {
    if a.is_empty() && b.is_empty() {
        return 0.0;
    }
    let mut candidates = vec![0.0];
    for &p in a {
        candidates.push(diagonal_cost(p));
    }
    for &q in b {
        candidates.push(diagonal_cost(q));
    }
    for &p in a {
        for &q in b {
            candidates.push(linf(p, q));
        }
    }
    candidates.sort_by(|x, y| x.partial_cmp(y).unwrap());
    candidates.dedup();

    let mut lo = 0;
    let mut hi = candidates.len() - 1;
    debug_assert!(feasible(a, b, candidates[hi]));
    while lo < hi {
        let mid = (lo + hi) / 2;
        if feasible(a, b, candidates[mid]) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    candidates[lo]
}

/// Perfect-matching feasibility at threshold `t` on the bipartite graph of
/// `a`-points plus |b| diagonal slots against `b`-points plus |a| diagonal
/// slots. Kuhn's augmenting-path matching; sizes here are small.
fn feasible(a: &[(f64, f64)], b: &[(f64, f64)], t: f64) -> bool {
    let n = a.len();
    let m = b.len();
    let size = n + m;
    // Left vertex l < n is a-point l, otherwise diagonal slot (for b).
    // Right vertex r < m is b-point r, otherwise diagonal slot (for a).
    let edge = |l: usize, r: usize| -> bool {
        match (l < n, r < m) {
            (true, true) => linf(a[l], b[r]) <= t,
            (true, false) => diagonal_cost(a[l]) <= t,
            (false, true) => diagonal_cost(b[r]) <= t,
            (false, false) => true,
        }
    };

    let mut match_right: Vec<Option<usize>> = vec![None; size];

    fn augment(
        l: usize,
        size: usize,
        edge: &dyn Fn(usize, usize) -> bool,
        match_right: &mut [Option<usize>],
        visited: &mut [bool],
    ) -> bool {
        for r in 0..size {
            if !visited[r] && edge(l, r) {
                visited[r] = true;
                if match_right[r].map_or(true, |prev| {
                    augment(prev, size, edge, match_right, visited)
                }) {
                    match_right[r] = Some(l);
                    return true;
                }
            }
        }
        false
    }

    for l in 0..size {
        let mut visited = vec![false; size];
        if !augment(l, size, &edge, &mut match_right, &mut visited) {
            return false;
        }
    }
    true
}

/// Bottleneck distance between two persistence diagrams of the same
/// dimension. Essential classes participate with their capped coordinates.
pub fn bottleneck_distance(a: &PersistenceDiagram, b: &PersistenceDiagram) -> Result<f64> {
    if a.dim != b.dim {
        return Err(Error::invalid(
            MODULE,
            format!("diagram dimensions differ: {} vs {}", a.dim, b.dim),
        ));
    }
    Ok(points_bottleneck(&a.pairs, &b.pairs))
}

/// Bottleneck distance between two super-level-set diagrams.
///
/// The essential classes never die in the filtration, so they may only be
/// matched to each other (at their l-infinity displacement in the capped
/// coordinates), never to the diagonal; the finite classes are matched by
/// the ordinary diagonal-augmented bottleneck.
pub fn bottleneck_distance_levelset(a: &LevelSetDiagram, b: &LevelSetDiagram) -> f64 {
    let ess_a = (a.essential.1, a.essential.0);
    let ess_b = (b.essential.1, b.essential.0);
    let ess_cost = linf(ess_a, ess_b);
    let finite_a: Vec<(f64, f64)> = a.pairs.iter().map(|&(hi, lo)| (lo, hi)).collect();
    let finite_b: Vec<(f64, f64)> = b.pairs.iter().map(|&(hi, lo)| (lo, hi)).collect();
    ess_cost.max(points_bottleneck(&finite_a, &finite_b))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_diagrams_are_at_distance_zero() {
        let a = vec![(0.0, 2.0), (1.0, 1.5)];
        assert_eq!(points_bottleneck(&a, &a), 0.0);
    }

    #[test]
    fn single_point_to_empty_costs_half_persistence() {
        let a = vec![(0.0, 2.0)];
        assert_eq!(points_bottleneck(&a, &[]), 1.0);
        assert_eq!(points_bottleneck(&[], &a), 1.0);
    }

    #[test]
    fn direct_match_beats_diagonal_route() {
        let a = vec![(0.0, 2.0)];
        let b = vec![(0.0, 3.0)];
        assert_eq!(points_bottleneck(&a, &b), 1.0);
    }

    #[test]
    fn diagonal_route_wins_when_cheaper() {
        let a = vec![(0.0, 0.5)];
        let b = vec![(10.0, 10.4)];
        // Matching both to the diagonal costs max(0.25, 0.2).
        assert_eq!(points_bottleneck(&a, &b), 0.25);
    }

    #[test]
    fn dimension_mismatch_is_invalid() {
        let a = PersistenceDiagram::empty(0);
        let b = PersistenceDiagram::empty(1);
        assert!(bottleneck_distance(&a, &b).is_err());
    }

    #[test]
    fn levelset_distance_uses_essential_bars() {
        let a = LevelSetDiagram {
            pairs: vec![],
            essential: (1.0, 0.0),
        };
        let b = LevelSetDiagram {
            pairs: vec![],
            essential: (1.4, 0.0),
        };
        assert!((bottleneck_distance_levelset(&a, &b) - 0.4).abs() < 1e-15);
    }

    #[test]
    fn levelset_essentials_never_take_the_diagonal() {
        // Flat profiles at distant levels: short essential bars whose
        // diagonal projections are cheap, but the class displacement is
        // the level difference.
        let low = LevelSetDiagram {
            pairs: vec![],
            essential: (0.06, 0.04),
        };
        let high = LevelSetDiagram {
            pairs: vec![],
            essential: (0.91, 0.88),
        };
        let d = bottleneck_distance_levelset(&low, &high);
        assert!((d - 0.85).abs() < 1e-12, "distance {d}");
    }
}
