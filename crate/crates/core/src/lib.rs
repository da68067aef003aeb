//! Phenotyping of physiological time-series cohorts.
//!
//! The crate covers three analysis routes over a cohort of uniformly
//! sampled signals:
//!
//! * time-domain features (ACF/PACF) and frequency-domain features
//!   (Welch spectral densities) clustered by fuzzy c-medoids, with the
//!   resulting memberships explained through Dirichlet regression on
//!   covariates;
//! * per-frame periodicity scores from sliding-window delay embeddings
//!   and 1-dimensional Vietoris-Rips persistence;
//! * clustering of periodicity profiles through super-level-set
//!   0-dimensional persistence, bottleneck distances, and
//!   complete-linkage hierarchical clustering.
//!
//! Preprocessing (zero-phase Butterworth filtering, resampling, framing),
//! classical MDS for plotting, cluster summary tables, and seeded
//! synthetic generators round out the toolkit.

pub mod cluster_downstream;
pub mod dirichlet_reg;
pub mod error;
pub mod fuzzy_cluster;
pub mod rng;
pub mod signal_core;
pub mod synthgen;
pub mod tda_core;
pub mod tsfeatures;

pub use error::{Error, Result};
