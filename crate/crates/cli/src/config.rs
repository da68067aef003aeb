//! Pipeline configuration: one JSON document with a section per stage.
//! Every default mirrors the reference analysis (32 Hz airflow, order-4
//! Butterworth at 1.2 Hz, PACF lag 1500, 4096-sample Welch window,
//! fuzziness 1.5 over K in 2..=6, 62 frames with the odd ones kept,
//! embedding dimension 14, 150 landmarks, dendrogram cut at 0.3).

use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    #[serde(default)]
    pub seed: u64,
    pub input: InputConfig,
    #[serde(default)]
    pub preprocess: PreprocessConfig,
    #[serde(default)]
    pub features: FeaturesConfig,
    #[serde(default)]
    pub fuzzy: FuzzyConfig,
    #[serde(default)]
    pub dirichlet: DirichletConfig,
    #[serde(default)]
    pub tda: TdaConfig,
    #[serde(default)]
    pub cluster: ClusterConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

impl Config {
    pub fn from_path(path: &Path) -> anyhow::Result<Config> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        let config: Config = serde_json::from_str(&text)
            .with_context(|| format!("parsing config {}", path.display()))?;
        Ok(config)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputConfig {
    #[serde(default = "default_sample_rate")]
    pub sample_rate_hz: f64,
    /// Subjects read from CSV files (`time,value` header or a headerless
    /// single value column).
    #[serde(default)]
    pub subjects: Vec<SubjectEntry>,
    /// Covariate table CSV with header `id,<covariate>...`.
    #[serde(default)]
    pub covariates_csv: Option<PathBuf>,
    /// Covariate used as the external severity score in summaries;
    /// defaults to the first column of the covariate table.
    #[serde(default)]
    pub severity_covariate: Option<String>,
    /// Generated cohort, used when no CSV subjects are listed.
    #[serde(default)]
    pub synthetic: Option<SyntheticCohort>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubjectEntry {
    pub id: String,
    pub path: PathBuf,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SyntheticCohort {
    #[serde(default = "default_three")]
    pub periodic_subjects: usize,
    #[serde(default = "default_three")]
    pub noise_subjects: usize,
    /// Samples per subject at `sample_rate_hz`.
    #[serde(default = "default_synth_samples")]
    pub samples: usize,
    /// Breathing-like period of the periodic subjects, in seconds.
    #[serde(default = "default_period_s")]
    pub period_s: f64,
    #[serde(default = "default_signal_noise")]
    pub signal_noise_sd: f64,
    #[serde(default = "default_noise_sd")]
    pub noise_sd: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PreprocessConfig {
    #[serde(default = "default_true")]
    pub apply_filter: bool,
    #[serde(default = "default_filter_order")]
    pub filter_order: usize,
    #[serde(default = "default_cutoff")]
    pub cutoff_hz: f64,
    /// Common length all subjects are re-interpolated to; `null` skips
    /// resampling.
    #[serde(default = "default_resample_len")]
    pub resample_len: Option<usize>,
    /// Filter at the native rate before resampling (the default), or
    /// resample first.
    #[serde(default = "default_true")]
    pub filter_before_resample: bool,
}

impl Default for PreprocessConfig {
    fn default() -> Self {
        serde_json::from_str("{}").unwrap()
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FeaturesConfig {
    #[serde(default = "default_pacf_lag")]
    pub pacf_lag: usize,
    #[serde(default = "default_welch_window")]
    pub welch_window: usize,
    #[serde(default = "default_half")]
    pub welch_overlap: f64,
    #[serde(default = "default_half")]
    pub welch_taper: f64,
}

impl Default for FeaturesConfig {
    fn default() -> Self {
        serde_json::from_str("{}").unwrap()
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FuzzyConfig {
    #[serde(default = "default_k_min")]
    pub k_min: usize,
    #[serde(default = "default_k_max")]
    pub k_max: usize,
    #[serde(default = "default_fuzziness")]
    pub fuzziness: f64,
    #[serde(default = "default_restarts")]
    pub restarts: usize,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
}

impl Default for FuzzyConfig {
    fn default() -> Self {
        serde_json::from_str("{}").unwrap()
    }
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DirichletConfig {
    #[serde(default)]
    pub ref_category: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TdaConfig {
    #[serde(default = "default_n_frames")]
    pub n_frames: usize,
    #[serde(default = "default_true")]
    pub keep_odd: bool,
    #[serde(default = "default_points_per_frame")]
    pub points_per_frame: usize,
    #[serde(default = "default_embedding_dim")]
    pub embedding_dim: usize,
    #[serde(default = "default_delay_max_lag")]
    pub delay_max_lag: usize,
    /// Cap on embedded rows per frame; `null` embeds every window.
    #[serde(default)]
    pub max_embed_points: Option<usize>,
    #[serde(default = "default_landmarks")]
    pub landmarks: usize,
    /// Principal components kept before the Rips filtration; `null`
    /// runs on the full standardized cloud.
    #[serde(default = "default_pca")]
    pub pca_components: Option<usize>,
    #[serde(default = "default_max_scale")]
    pub max_scale: f64,
}

impl Default for TdaConfig {
    fn default() -> Self {
        serde_json::from_str("{}").unwrap()
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClusterConfig {
    #[serde(default = "default_cut_height")]
    pub cut_height: f64,
    /// Overrides the height cut with an exact cluster count when set.
    #[serde(default)]
    pub cut_count: Option<usize>,
}

impl Default for ClusterConfig {
    fn default() -> Self {
        serde_json::from_str("{}").unwrap()
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default = "default_true")]
    pub emit_plots: bool,
    /// Also write each retained frame as its own CSV.
    #[serde(default)]
    pub emit_frames: bool,
}

impl Default for OutputConfig {
    fn default() -> Self {
        serde_json::from_str("{}").unwrap()
    }
}

fn default_sample_rate() -> f64 {
    32.0
}
fn default_three() -> usize {
    3
}
fn default_synth_samples() -> usize {
    76_800
}
fn default_period_s() -> f64 {
    4.0
}
fn default_signal_noise() -> f64 {
    0.3
}
fn default_noise_sd() -> f64 {
    0.8
}
fn default_true() -> bool {
    true
}
fn default_filter_order() -> usize {
    4
}
fn default_cutoff() -> f64 {
    1.2
}
fn default_resample_len() -> Option<usize> {
    Some(1_200_000)
}
fn default_pacf_lag() -> usize {
    1500
}
fn default_welch_window() -> usize {
    4096
}
fn default_half() -> f64 {
    0.5
}
fn default_k_min() -> usize {
    2
}
fn default_k_max() -> usize {
    6
}
fn default_fuzziness() -> f64 {
    1.5
}
fn default_restarts() -> usize {
    20
}
fn default_max_iter() -> usize {
    100
}
fn default_n_frames() -> usize {
    62
}
fn default_points_per_frame() -> usize {
    1200
}
fn default_embedding_dim() -> usize {
    14
}
fn default_delay_max_lag() -> usize {
    64
}
fn default_landmarks() -> usize {
    150
}
fn default_pca() -> Option<usize> {
    Some(2)
}
fn default_max_scale() -> f64 {
    2.0
}
fn default_cut_height() -> f64 {
    0.3
}
