//! Cohort pipeline: ingest, preprocess, and the three analysis branches
//! (PACF features, Welch features, per-frame periodicity), with every
//! table written as CSV/JSON under the artifact directory.
//!
//! Outputs are byte-deterministic for a fixed config and seed: subjects
//! and frames are processed by a worker pool but collected in input
//! order, and all randomness is derived from the configured seed.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use phenots::cluster_downstream::{
    classical_mds, complete_linkage, cut, summarize_clusters, CutCriterion, Dendrogram,
};
use phenots::dirichlet_reg::{boundary_compress, fit, significance_code};
use phenots::fuzzy_cluster::{fuzzy_c_medoids, select_k, DistanceMatrix, FuzzyModel};
use phenots::signal_core::{
    frame_pipeline, resample_linear, zero_phase_lowpass, FilterSpec, TimeSeries,
};
use phenots::synthgen::{gen_periodic, gen_white_noise};
use phenots::tda_core::{
    bottleneck_distance_levelset, maxmin_landmarks, pca_reduce, periodicity_score,
    rips_persistence, select_delay, sliding_window_embed, standardize_cloud, subsample_cloud,
    superlevel_persistence_0d, EmbeddingConfig, LevelSetDiagram,
};
use phenots::tsfeatures::{euclidean_distance, pacf, welch_density};
use rand::RngExt;

use crate::config::Config;
use crate::plot;

pub struct Subject {
    pub id: String,
    pub ts: TimeSeries,
    pub covariates: Vec<f64>,
}

pub struct Cohort {
    pub subjects: Vec<Subject>,
    pub covariate_names: Vec<String>,
    pub severity_index: Option<usize>,
}

impl Cohort {
    pub fn ids(&self) -> Vec<String> {
        self.subjects.iter().map(|s| s.id.clone()).collect()
    }

    pub fn severity(&self) -> Vec<f64> {
        match self.severity_index {
            Some(idx) => self.subjects.iter().map(|s| s.covariates[idx]).collect(),
            None => vec![0.0; self.subjects.len()],
        }
    }
}

fn read_series_csv(path: &Path, id: &str, sample_rate_hz: f64) -> anyhow::Result<TimeSeries> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading series {}", path.display()))?;
    let mut values = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let last = line.split(',').next_back().unwrap().trim();
        match last.parse::<f64>() {
            Ok(v) => values.push(v),
            Err(_) if lineno == 0 => continue, // header row
            Err(e) => bail!("{}:{}: bad sample: {e}", path.display(), lineno + 1),
        }
    }
    Ok(TimeSeries::new(id, values, sample_rate_hz)?)
}

fn read_covariates_csv(path: &Path) -> anyhow::Result<(Vec<String>, Vec<(String, Vec<f64>)>)> {
    let mut reader = csv::Reader::from_path(path)
        .with_context(|| format!("reading covariates {}", path.display()))?;
    let names: Vec<String> = reader
        .headers()?
        .iter()
        .skip(1)
        .map(|s| s.to_string())
        .collect();
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record?;
        let id = record
            .get(0)
            .context("covariate row missing id")?
            .to_string();
        let values: Vec<f64> = record
            .iter()
            .skip(1)
            .map(|v| v.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .with_context(|| format!("covariate row for {id}"))?;
        rows.push((id, values));
    }
    Ok((names, rows))
}

/// Loads subjects from CSV files or generates the configured synthetic
/// cohort (writing its covariate table next to the other artifacts).
pub fn load_cohort(config: &Config, out_dir: &Path) -> anyhow::Result<Cohort> {
    let rate = config.input.sample_rate_hz;
    let mut subjects = Vec::new();
    let mut covariate_names = Vec::new();

    if !config.input.subjects.is_empty() {
        for entry in &config.input.subjects {
            let ts = read_series_csv(&entry.path, &entry.id, rate)?;
            subjects.push(Subject {
                id: entry.id.clone(),
                ts,
                covariates: Vec::new(),
            });
        }
        if let Some(cov_path) = &config.input.covariates_csv {
            let (names, rows) = read_covariates_csv(cov_path)?;
            covariate_names = names;
            for subject in subjects.iter_mut() {
                let row = rows
                    .iter()
                    .find(|(id, _)| *id == subject.id)
                    .with_context(|| format!("no covariate row for subject {}", subject.id))?;
                subject.covariates = row.1.clone();
            }
        }
    } else if let Some(synth) = &config.input.synthetic {
        let period_samples = synth.period_s * rate;
        let mut rng = phenots::rng::chacha(config.seed.wrapping_add(0x5EED));
        for i in 0..synth.periodic_subjects {
            let seed = config.seed.wrapping_add(17 * (i as u64 + 1));
            let ts = gen_periodic(period_samples, synth.signal_noise_sd, synth.samples, seed)?;
            let ts = TimeSeries::new(format!("P{:02}", i + 1), ts.values().to_vec(), rate)?;
            let severity = 2.0 + 2.0 * rng.random::<f64>();
            subjects.push(Subject {
                id: format!("P{:02}", i + 1),
                ts,
                covariates: vec![severity],
            });
        }
        for i in 0..synth.noise_subjects {
            let seed = config.seed.wrapping_add(91 * (i as u64 + 1) + 7);
            let ts = gen_white_noise(synth.noise_sd, synth.samples, seed)?;
            let ts = TimeSeries::new(format!("N{:02}", i + 1), ts.values().to_vec(), rate)?;
            let severity = 9.0 + 4.0 * rng.random::<f64>();
            subjects.push(Subject {
                id: format!("N{:02}", i + 1),
                ts,
                covariates: vec![severity],
            });
        }
        covariate_names = vec!["severity".to_string()];
        // Persist the generated covariates like any provided table.
        let mut w = csv::Writer::from_path(out_dir.join("covariates.csv"))?;
        w.write_record(["id", "severity"])?;
        for s in &subjects {
            w.write_record([s.id.as_str(), &s.covariates[0].to_string()])?;
        }
        w.flush()?;
    } else {
        bail!("input: configure either csv subjects or a synthetic cohort");
    }

    if subjects.len() < 2 {
        bail!("cohort needs at least 2 subjects, got {}", subjects.len());
    }

    let severity_index = match (&config.input.severity_covariate, covariate_names.is_empty()) {
        (_, true) => None,
        (Some(name), false) => Some(
            covariate_names
                .iter()
                .position(|n| n == name)
                .with_context(|| format!("severity covariate {name} not in table"))?,
        ),
        (None, false) => Some(0),
    };

    Ok(Cohort {
        subjects,
        covariate_names,
        severity_index,
    })
}

/// Filter and resample every subject (order preserved; subjects are
/// processed in parallel).
pub fn preprocess(config: &Config, cohort: Cohort) -> anyhow::Result<Cohort> {
    let pre = &config.preprocess;
    let spec = FilterSpec::new(pre.filter_order, pre.cutoff_hz)?;
    let subjects = cohort
        .subjects
        .into_par_iter()
        .map(|subject| -> anyhow::Result<Subject> {
            let mut ts = subject.ts;
            if pre.apply_filter && pre.filter_before_resample {
                ts = zero_phase_lowpass(&ts, &spec)?;
            }
            if let Some(len) = pre.resample_len {
                ts = resample_linear(&ts, len)?;
            }
            if pre.apply_filter && !pre.filter_before_resample {
                ts = zero_phase_lowpass(&ts, &spec)?;
            }
            Ok(Subject { ts, ..subject })
        })
        .collect::<anyhow::Result<Vec<_>>>()?;
    Ok(Cohort { subjects, ..cohort })
}

fn write_feature_csv(
    path: &Path,
    ids: &[String],
    prefix: &str,
    start_index: usize,
    vectors: &[Vec<f64>],
) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    let len = vectors.first().map_or(0, |v| v.len());
    let mut header = vec!["id".to_string()];
    header.extend((0..len).map(|i| format!("{prefix}{}", i + start_index)));
    w.write_record(&header)?;
    for (id, vec) in ids.iter().zip(vectors) {
        let mut record = vec![id.clone()];
        record.extend(vec.iter().map(|v| v.to_string()));
        w.write_record(&record)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize, Deserialize)]
struct ModelSummary {
    k: usize,
    fuzziness: f64,
    objective: f64,
    medoid_ids: Vec<String>,
    silhouette_by_k: Vec<(usize, f64)>,
}

pub struct BranchResult {
    pub name: &'static str,
    pub k: usize,
    pub labels: Vec<usize>,
}

/// PACF feature vectors per subject (parallel, order preserved).
pub fn compute_pacf_vectors(config: &Config, cohort: &Cohort) -> anyhow::Result<Vec<Vec<f64>>> {
    cohort
        .subjects
        .par_iter()
        .map(|s| -> anyhow::Result<Vec<f64>> {
            Ok(pacf(&s.ts, config.features.pacf_lag)?.values().to_vec())
        })
        .collect()
}

/// Welch spectral-density vectors per subject.
pub fn compute_welch_vectors(config: &Config, cohort: &Cohort) -> anyhow::Result<Vec<Vec<f64>>> {
    cohort
        .subjects
        .par_iter()
        .map(|s| -> anyhow::Result<Vec<f64>> {
            Ok(welch_density(
                &s.ts,
                config.features.welch_window,
                config.features.welch_overlap,
                config.features.welch_taper,
            )?
            .density)
        })
        .collect()
}

/// Computes and writes both feature tables.
pub fn export_features(
    config: &Config,
    out_dir: &Path,
    cohort: &Cohort,
) -> anyhow::Result<(Vec<Vec<f64>>, Vec<Vec<f64>>)> {
    let ids = cohort.ids();
    let pacf_vectors = compute_pacf_vectors(config, cohort)?;
    write_feature_csv(
        &out_dir.join("features_pacf.csv"),
        &ids,
        "lag_",
        1,
        &pacf_vectors,
    )?;
    let welch_vectors = compute_welch_vectors(config, cohort)?;
    write_feature_csv(
        &out_dir.join("features_welch.csv"),
        &ids,
        "f_",
        0,
        &welch_vectors,
    )?;
    Ok((pacf_vectors, welch_vectors))
}

/// Fuzzy clustering plus Dirichlet regression over one feature set.
/// Writes the `membership_*`, `model_*`, `mds_*`, and `dirichlet_fit_*`
/// artifacts.
pub fn feature_branch(
    config: &Config,
    out_dir: &Path,
    cohort: &Cohort,
    name: &'static str,
    vectors: Vec<Vec<f64>>,
) -> anyhow::Result<BranchResult> {
    let ids = cohort.ids();
    let n = ids.len();

    let dist = DistanceMatrix::from_fn(n, ids.clone(), |i, j| {
        euclidean_distance(&vectors[i], &vectors[j]).expect("equal lengths")
    })?;

    let fz = &config.fuzzy;
    let k_hi = fz.k_max.min(n - 1);
    if fz.k_min > k_hi {
        bail!("fuzzy_cluster: candidate range [{}, {k_hi}] is empty for {n} subjects", fz.k_min);
    }
    let selection = select_k(
        &dist,
        fz.k_min,
        k_hi,
        fz.fuzziness,
        fz.restarts,
        fz.max_iter,
        config.seed,
    )?;
    let model = fuzzy_c_medoids(
        &dist,
        selection.k,
        fz.fuzziness,
        fz.restarts,
        fz.max_iter,
        config.seed,
    )?;
    let labels = model.membership.harden();

    write_membership(&out_dir.join(format!("membership_{name}.csv")), &ids, &model)?;
    let summary = ModelSummary {
        k: selection.k,
        fuzziness: fz.fuzziness,
        objective: model.objective,
        medoid_ids: model
            .medoid_indices
            .iter()
            .map(|&i| ids[i].clone())
            .collect(),
        silhouette_by_k: selection.scores.clone(),
    };
    std::fs::write(
        out_dir.join(format!("model_{name}.json")),
        serde_json::to_string_pretty(&summary)?,
    )?;

    // Planar MDS coordinates for plotting.
    let mds = classical_mds(&dist, 2.min(n - 1))?;
    let mut w = csv::Writer::from_path(out_dir.join(format!("mds_{name}.csv")))?;
    w.write_record(["id", "x", "y", "cluster"])?;
    for i in 0..n {
        let x = mds.coordinates[i][0];
        let y = mds.coordinates[i].get(1).copied().unwrap_or(0.0);
        w.write_record([
            ids[i].as_str(),
            &x.to_string(),
            &y.to_string(),
            &labels[i].to_string(),
        ])?;
    }
    w.flush()?;

    dirichlet_branch(config, out_dir, cohort, name, &model)?;

    Ok(BranchResult {
        name,
        k: selection.k,
        labels,
    })
}

fn write_membership(path: &Path, ids: &[String], model: &FuzzyModel) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    let k = model.membership.k();
    let mut header = vec!["id".to_string()];
    header.extend((1..=k).map(|c| format!("u_{c}")));
    w.write_record(&header)?;
    for (i, id) in ids.iter().enumerate() {
        let mut record = vec![id.clone()];
        record.extend(model.membership.row(i).iter().map(|u| u.to_string()));
        w.write_record(&record)?;
    }
    w.flush()?;
    Ok(())
}

/// Dirichlet regression of the memberships on the covariate table
/// (intercept-only when no covariates were provided).
fn dirichlet_branch(
    config: &Config,
    out_dir: &Path,
    cohort: &Cohort,
    name: &str,
    model: &FuzzyModel,
) -> anyhow::Result<()> {
    let n = cohort.subjects.len();
    let k = model.membership.k();
    let q = cohort.covariate_names.len();

    let y_raw = DMatrix::from_fn(n, k, |i, c| model.membership.get(i, c));
    let y = boundary_compress(&y_raw)?;
    let x = DMatrix::from_fn(n, q, |i, j| cohort.subjects[i].covariates[j]);
    let ref_category = config.dirichlet.ref_category.min(k - 1);
    let fitted = fit(&y, &x, ref_category)?;

    let mut w = csv::Writer::from_path(out_dir.join(format!("dirichlet_fit_{name}.csv")))?;
    w.write_record(["category", "term", "estimate", "se", "z", "p", "signif"])?;
    let mut terms = vec!["intercept".to_string()];
    terms.extend(cohort.covariate_names.iter().cloned());
    for (row, category) in fitted.free_categories().into_iter().enumerate() {
        for (col, term) in terms.iter().enumerate() {
            let est = fitted.beta[(row, col)];
            let (se, z, p, sig) = match &fitted.wald {
                Some(wald) => {
                    let p = wald.p_beta[(row, col)];
                    (
                        wald.se_beta[(row, col)].to_string(),
                        wald.z_beta[(row, col)].to_string(),
                        p.to_string(),
                        significance_code(p).to_string(),
                    )
                }
                None => (String::new(), String::new(), String::new(), String::new()),
            };
            w.write_record([
                &format!("cluster_{}", category + 1),
                term,
                &est.to_string(),
                &se,
                &z,
                &p,
                &sig,
            ])?;
        }
    }
    let (se, z, p, sig) = match &fitted.wald {
        Some(wald) => (
            wald.se_log_phi.to_string(),
            wald.z_log_phi.to_string(),
            wald.p_log_phi.to_string(),
            significance_code(wald.p_log_phi).to_string(),
        ),
        None => (String::new(), String::new(), String::new(), String::new()),
    };
    w.write_record([
        "precision",
        "log_phi",
        &fitted.log_phi.to_string(),
        &se,
        &z,
        &p,
        &sig,
    ])?;
    w.flush()?;

    // Model dump with everything needed to reproduce predictions.
    #[derive(Serialize)]
    struct FitDump<'a> {
        n_categories: usize,
        ref_category: usize,
        covariates: &'a [String],
        /// Row per non-reference category (ascending), intercept first.
        beta: Vec<Vec<f64>>,
        log_phi: f64,
        loglik: f64,
        converged: bool,
        iterations: usize,
    }
    let dump = FitDump {
        n_categories: k,
        ref_category,
        covariates: &cohort.covariate_names,
        beta: (0..k - 1)
            .map(|r| (0..q + 1).map(|c| fitted.beta[(r, c)]).collect())
            .collect(),
        log_phi: fitted.log_phi,
        loglik: fitted.loglik,
        converged: fitted.converged,
        iterations: fitted.iterations,
    };
    std::fs::write(
        out_dir.join(format!("dirichlet_model_{name}.json")),
        serde_json::to_string_pretty(&dump)?,
    )?;
    Ok(())
}

/// Per-frame periodicity scoring for one subject.
fn score_frames(config: &Config, subject: &Subject) -> anyhow::Result<Vec<f64>> {
    let tda = &config.tda;
    let frames = frame_pipeline(
        &subject.ts,
        tda.n_frames,
        tda.keep_odd,
        tda.points_per_frame,
    )?;
    let mut scores = Vec::with_capacity(frames.frames.len());
    for (frame, &frame_idx) in frames.frames.iter().zip(&frames.selected_indices) {
        let values = frame.values();
        let delay = select_delay(values, tda.delay_max_lag)?;
        let span = tda.embedding_dim * delay;
        if values.len() <= span + 1 {
            bail!(
                "tda_core: frame of {} samples too short for window {} (subject {})",
                values.len(),
                span + 1,
                subject.id
            );
        }
        let points = (values.len() - span).min(tda.max_embed_points.unwrap_or(usize::MAX));
        let cfg = EmbeddingConfig::new(tda.embedding_dim, delay, points)?;
        let cloud = sliding_window_embed(values, &cfg)?;
        let (std_cloud, _) = standardize_cloud(&cloud);
        let reduced = match tda.pca_components {
            Some(k) if k < std_cloud.dim() => pca_reduce(&std_cloud, k)?,
            _ => std_cloud,
        };
        // Seed landmark selection per (subject, frame) so reruns agree.
        let landmark_seed = config
            .seed
            .wrapping_add(frame_idx as u64)
            .wrapping_add(fxhash(&subject.id));
        let landmarks = maxmin_landmarks(&reduced, tda.landmarks, landmark_seed);
        let sub = subsample_cloud(&reduced, &landmarks);
        let dgms = rips_persistence(&sub.distance_matrix(), 1, tda.max_scale)?;
        scores.push(periodicity_score(&dgms[1])?);
    }
    Ok(scores)
}

fn fxhash(s: &str) -> u64 {
    let mut h = 0xcbf2_9ce4_8422_2325u64;
    for b in s.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x1000_0000_01b3);
    }
    h
}

#[derive(Serialize, Deserialize)]
struct DiagramRecord {
    id: String,
    /// Finite pairs as (peak value, merge value).
    pairs: Vec<(f64, f64)>,
    /// (global max, global min).
    essential: (f64, f64),
}

pub struct TdaResult {
    pub labels: Vec<usize>,
    pub profiles: Vec<Vec<f64>>,
}

/// Branch C: periodicity profiles, super-level diagrams, bottleneck
/// matrix, hierarchical clustering, and summary tables.
pub fn tda_branch(config: &Config, out_dir: &Path, cohort: &Cohort) -> anyhow::Result<TdaResult> {
    let ids = cohort.ids();
    let n = ids.len();

    let profiles: Vec<Vec<f64>> = cohort
        .subjects
        .par_iter()
        .map(|s| score_frames(config, s))
        .collect::<anyhow::Result<Vec<_>>>()?;

    let n_frames = profiles[0].len();
    let mut w = csv::Writer::from_path(out_dir.join("periodicity_profiles.csv"))?;
    let mut header = vec!["subject_id".to_string()];
    header.extend((1..=n_frames).map(|f| format!("frame_{f}")));
    w.write_record(&header)?;
    for (id, profile) in ids.iter().zip(&profiles) {
        let mut record = vec![id.clone()];
        record.extend(profile.iter().map(|v| v.to_string()));
        w.write_record(&record)?;
    }
    w.flush()?;

    if config.output.emit_frames {
        for subject in &cohort.subjects {
            let frames = frame_pipeline(
                &subject.ts,
                config.tda.n_frames,
                config.tda.keep_odd,
                config.tda.points_per_frame,
            )?;
            for (frame, idx) in frames.frames.iter().zip(&frames.selected_indices) {
                let mut fw = csv::Writer::from_path(
                    out_dir.join(format!("frame_{}_{:02}.csv", subject.id, idx + 1)),
                )?;
                fw.write_record(["value"])?;
                for v in frame.values() {
                    fw.write_record([v.to_string()])?;
                }
                fw.flush()?;
            }
        }
    }

    let diagrams: Vec<LevelSetDiagram> = profiles
        .iter()
        .map(|p| superlevel_persistence_0d(p))
        .collect::<Result<_, _>>()?;
    let records: Vec<DiagramRecord> = ids
        .iter()
        .zip(&diagrams)
        .map(|(id, d)| DiagramRecord {
            id: id.clone(),
            pairs: d.pairs.clone(),
            essential: d.essential,
        })
        .collect();
    std::fs::write(
        out_dir.join("superlevel_diagrams.json"),
        serde_json::to_string_pretty(&records)?,
    )?;

    let dist = DistanceMatrix::from_fn(n, ids.clone(), |i, j| {
        bottleneck_distance_levelset(&diagrams[i], &diagrams[j])
    })?;
    let mut w = csv::Writer::from_path(out_dir.join("bottleneck.csv"))?;
    let mut header = vec!["id".to_string()];
    header.extend(ids.iter().cloned());
    w.write_record(&header)?;
    for i in 0..n {
        let mut record = vec![ids[i].clone()];
        record.extend((0..n).map(|j| dist.get(i, j).to_string()));
        w.write_record(&record)?;
    }
    w.flush()?;

    let dendro = complete_linkage(&dist)?;
    write_dendrogram(&out_dir.join("dendrogram_tda.json"), &dendro)?;
    let criterion = match config.cluster.cut_count {
        Some(k) => CutCriterion::Count(k),
        None => CutCriterion::Height(config.cluster.cut_height),
    };
    let labels = cut(&dendro, criterion)?;

    let mut w = csv::Writer::from_path(out_dir.join("clusters_tda.csv"))?;
    w.write_record(["id", "cluster"])?;
    for (id, label) in ids.iter().zip(&labels) {
        w.write_record([id.as_str(), &label.to_string()])?;
    }
    w.flush()?;

    let severity = cohort.severity();
    let summary = summarize_clusters(&labels, &profiles, &severity)?;
    let mut w = csv::Writer::from_path(out_dir.join("summary_tda.csv"))?;
    w.write_record([
        "cluster",
        "count",
        "avg_period_score",
        "sd_period_score",
        "avg_frame_sd",
        "sd_frame_sd",
        "avg_severity",
        "sd_severity",
    ])?;
    for c in &summary.clusters {
        w.write_record([
            c.label.to_string(),
            c.count.to_string(),
            c.score_mean.to_string(),
            c.score_sd.to_string(),
            c.frame_sd_mean.to_string(),
            c.frame_sd_sd.to_string(),
            c.severity_mean.to_string(),
            c.severity_sd.to_string(),
        ])?;
    }
    w.flush()?;

    // Tidy long-format export for external statistics tools.
    let mut w = csv::Writer::from_path(out_dir.join("tda_long.csv"))?;
    let mut header = vec![
        "subject".to_string(),
        "frame".to_string(),
        "score".to_string(),
        "cluster".to_string(),
    ];
    header.extend(cohort.covariate_names.iter().cloned());
    w.write_record(&header)?;
    for (i, profile) in profiles.iter().enumerate() {
        for (f, score) in profile.iter().enumerate() {
            let mut record = vec![
                ids[i].clone(),
                (f + 1).to_string(),
                score.to_string(),
                labels[i].to_string(),
            ];
            record.extend(cohort.subjects[i].covariates.iter().map(|v| v.to_string()));
            w.write_record(&record)?;
        }
    }
    w.flush()?;

    Ok(TdaResult { labels, profiles })
}

fn write_dendrogram(path: &Path, dendro: &Dendrogram) -> anyhow::Result<()> {
    #[derive(Serialize)]
    struct MergeRecord {
        a: usize,
        b: usize,
        height: f64,
    }
    #[derive(Serialize)]
    struct DendrogramRecord {
        n_leaves: usize,
        merges: Vec<MergeRecord>,
    }
    let record = DendrogramRecord {
        n_leaves: dendro.n_leaves,
        merges: dendro
            .merges
            .iter()
            .map(|m| MergeRecord {
                a: m.a,
                b: m.b,
                height: m.height,
            })
            .collect(),
    };
    std::fs::write(path, serde_json::to_string_pretty(&record)?)?;
    Ok(())
}

/// Renders every SVG from the tables the pipeline wrote; usable on its
/// own against an existing artifact directory.
pub fn emit_plots(out_dir: &Path) -> anyhow::Result<Vec<PathBuf>> {
    let mut written = Vec::new();

    for name in ["pacf", "welch"] {
        let mds_path = out_dir.join(format!("mds_{name}.csv"));
        if mds_path.exists() {
            let mut reader = csv::Reader::from_path(&mds_path)?;
            let mut points = Vec::new();
            let mut labels = Vec::new();
            for record in reader.records() {
                let r = record?;
                points.push((r[1].parse::<f64>()?, r[2].parse::<f64>()?));
                labels.push(r[3].parse::<usize>()?);
            }
            let svg = plot::scatter(&format!("MDS ({name} features)"), &points, &labels);
            let path = out_dir.join(format!("mds_{name}.svg"));
            std::fs::write(&path, svg)?;
            written.push(path);
        }

        let mem_path = out_dir.join(format!("membership_{name}.csv"));
        if mem_path.exists() {
            let mut reader = csv::Reader::from_path(&mem_path)?;
            let mut ids = Vec::new();
            let mut rows = Vec::new();
            for record in reader.records() {
                let r = record?;
                ids.push(r[0].to_string());
                rows.push(
                    (1..r.len())
                        .map(|i| r[i].parse::<f64>())
                        .collect::<Result<Vec<f64>, _>>()?,
                );
            }
            let svg = plot::stacked_bars(&format!("Memberships ({name} features)"), &ids, &rows);
            let path = out_dir.join(format!("membership_{name}.svg"));
            std::fs::write(&path, svg)?;
            written.push(path);
        }
    }

    let profiles_path = out_dir.join("periodicity_profiles.csv");
    let clusters_path = out_dir.join("clusters_tda.csv");
    if profiles_path.exists() && clusters_path.exists() {
        let mut reader = csv::Reader::from_path(&clusters_path)?;
        let mut cluster_of = std::collections::BTreeMap::new();
        for record in reader.records() {
            let r = record?;
            cluster_of.insert(r[0].to_string(), r[1].parse::<usize>()?);
        }
        let mut reader = csv::Reader::from_path(&profiles_path)?;
        let mut by_cluster: std::collections::BTreeMap<usize, Vec<Vec<f64>>> =
            std::collections::BTreeMap::new();
        for record in reader.records() {
            let r = record?;
            let id = r[0].to_string();
            let profile: Vec<f64> = (1..r.len())
                .map(|i| r[i].parse::<f64>())
                .collect::<Result<_, _>>()?;
            if let Some(&c) = cluster_of.get(&id) {
                by_cluster.entry(c).or_default().push(profile);
            }
        }
        let cluster_means: Vec<(usize, Vec<f64>)> = by_cluster
            .into_iter()
            .map(|(c, profiles)| {
                let len = profiles[0].len();
                let mean: Vec<f64> = (0..len)
                    .map(|j| profiles.iter().map(|p| p[j]).sum::<f64>() / profiles.len() as f64)
                    .collect();
                (c, mean)
            })
            .collect();
        let svg = plot::profiles("Mean periodicity per cluster", &cluster_means);
        let path = out_dir.join("profiles_tda.svg");
        std::fs::write(&path, svg)?;
        written.push(path);
    }

    let diagrams_path = out_dir.join("superlevel_diagrams.json");
    if diagrams_path.exists() {
        let text = std::fs::read_to_string(&diagrams_path)?;
        let records: Vec<DiagramRecord> = serde_json::from_str(&text)?;
        let series: Vec<(String, Vec<(f64, f64)>)> = records
            .iter()
            .map(|r| {
                let mut pts: Vec<(f64, f64)> =
                    r.pairs.iter().map(|&(hi, lo)| (lo, hi)).collect();
                pts.push((r.essential.1, r.essential.0));
                (r.id.clone(), pts)
            })
            .collect();
        let svg = plot::diagram("Super-level persistence diagrams", &series);
        let path = out_dir.join("superlevel_diagrams.svg");
        std::fs::write(&path, svg)?;
        written.push(path);

        let bars: Vec<(String, Vec<(f64, f64)>)> = records
            .iter()
            .map(|r| {
                let mut intervals: Vec<(f64, f64)> =
                    r.pairs.iter().map(|&(hi, lo)| (lo, hi)).collect();
                intervals.push((r.essential.1, r.essential.0));
                (r.id.clone(), intervals)
            })
            .collect();
        let svg = plot::barcode("Super-level barcodes", &bars);
        let path = out_dir.join("barcodes_tda.svg");
        std::fs::write(&path, svg)?;
        written.push(path);
    }

    Ok(written)
}

/// Feature export plus both clustering/regression branches.
pub fn run_feature_branches(
    config: &Config,
    out_dir: &Path,
    cohort: &Cohort,
) -> anyhow::Result<(BranchResult, BranchResult)> {
    let (pacf_vectors, welch_vectors) = export_features(config, out_dir, cohort)?;
    let a = feature_branch(config, out_dir, cohort, "pacf", pacf_vectors)?;
    let b = feature_branch(config, out_dir, cohort, "welch", welch_vectors)?;
    Ok((a, b))
}

/// The full pipeline: ingest, preprocess, both feature branches, the
/// topological branch, and plots.
pub fn run(config: &Config, out_dir: &Path) -> anyhow::Result<()> {
    std::fs::create_dir_all(out_dir)?;
    let cohort = load_cohort(config, out_dir)?;
    let cohort = preprocess(config, cohort)?;
    run_feature_branches(config, out_dir, &cohort)?;
    tda_branch(config, out_dir, &cohort)?;
    if config.output.emit_plots {
        emit_plots(out_dir)?;
    }
    Ok(())
}
