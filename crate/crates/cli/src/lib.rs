//! Library surface of the cohort-phenotyping CLI: configuration,
//! pipeline stages, and plot rendering, reusable from the integration
//! tests.

pub mod config;
pub mod pipeline;
pub mod plot;
