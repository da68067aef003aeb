//! Persistence diagram containers and the periodicity score.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const MODULE: &str = "tda_core";

/// A persistence diagram in one homology dimension: (birth, death) pairs
/// with death >= birth. Essential classes are capped to a finite death
/// (the filtration cap) and flagged.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PersistenceDiagram {
    pub dim: usize,
    pub pairs: Vec<(f64, f64)>,
    pub essential: Vec<bool>,
}

impl PersistenceDiagram {
    pub fn new(dim: usize, pairs: Vec<(f64, f64)>, essential: Vec<bool>) -> Result<PersistenceDiagram> {
        if pairs.len() != essential.len() {
            return Err(Error::invalid(MODULE, "pairs and essential flags differ in length"));
        }
        for &(b, d) in &pairs {
            if !b.is_finite() || !d.is_finite() || d < b {
                return Err(Error::invalid(MODULE, format!("invalid pair ({b}, {d})")));
            }
        }
        Ok(PersistenceDiagram {
            dim,
            pairs,
            essential,
        })
    }

    pub fn empty(dim: usize) -> PersistenceDiagram {
        PersistenceDiagram {
            dim,
            pairs: Vec::new(),
            essential: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Lifetimes `death - birth` in pair order.
    pub fn persistences(&self) -> Vec<f64> {
        self.pairs.iter().map(|&(b, d)| d - b).collect()
    }

    /// The pair with the largest lifetime, if any.
    pub fn max_persistence_pair(&self) -> Option<(f64, f64)> {
        self.pairs
            .iter()
            .copied()
            .max_by(|a, b| (a.1 - a.0).partial_cmp(&(b.1 - b.0)).unwrap())
    }
}

/// Super-level-set 0-dimensional persistence of a profile: each finite
/// pair holds (peak value, merge value); the essential pair couples the
/// global maximum with the global minimum.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelSetDiagram {
    /// Finite pairs `(max_value, merge_value)` with positive persistence.
    pub pairs: Vec<(f64, f64)>,
    /// `(global_max, global_min)`.
    pub essential: (f64, f64),
}

impl LevelSetDiagram {
    /// All classes as `(lower, upper)` points, essential included, in the
    /// orientation used for bottleneck matching.
    pub fn points(&self) -> Vec<(f64, f64)> {
        let mut pts: Vec<(f64, f64)> = self.pairs.iter().map(|&(hi, lo)| (lo, hi)).collect();
        pts.push((self.essential.1, self.essential.0));
        pts
    }
}

/// Periodicity score of a dimension-1 diagram: the largest lifetime
/// normalized by sqrt(3) and clamped to [0, 1]. An empty diagram scores 0.
pub fn periodicity_score(dgm: &PersistenceDiagram) -> Result<f64> {
    if dgm.dim != 1 {
        return Err(Error::invalid(
            MODULE,
            format!("periodicity score needs a dimension-1 diagram, got {}", dgm.dim),
        ));
    }
    let best = dgm
        .pairs
        .iter()
        .map(|&(b, d)| d - b)
        .fold(0.0_f64, f64::max);
    Ok((best / 3.0_f64.sqrt()).clamp(0.0, 1.0))
}
