use std::path::PathBuf;

use anyhow::Context;
use clap::{Parser, Subcommand};

use phenots_cli::config::Config;
use phenots_cli::pipeline;

/// Phenotyping of physiological time-series cohorts: fuzzy clustering of
/// PACF/Welch features with Dirichlet regression, and periodicity
/// profiling through persistent homology.
#[derive(Parser)]
#[command(name = "phenots", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct RunArgs {
    /// Pipeline configuration (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Artifact directory.
    #[arg(long, default_value = "phenots-out")]
    out: PathBuf,
    /// Seed override; falls back to the config seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (0 = one per core).
    #[arg(long, default_value_t = 0)]
    jobs: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Run every branch of the pipeline and emit all artifacts.
    Run(RunArgs),
    /// Ingest and preprocess only, exporting the feature tables.
    Features(RunArgs),
    /// Features plus fuzzy clustering (memberships, models, MDS).
    Cluster(RunArgs),
    /// Cluster plus the Dirichlet regression fits.
    Dirichlet(RunArgs),
    /// The topological branch only (profiles, diagrams, clusters).
    Tda(RunArgs),
    /// Write a synthetic fixture series or point cloud as CSV.
    Synth {
        /// periodic | noise | infinity | ar
        #[arg(long)]
        kind: String,
        #[arg(long, default_value_t = 1200)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Period in samples (periodic kind).
        #[arg(long, default_value_t = 12.0)]
        period: f64,
        /// Noise standard deviation (kind-dependent default).
        #[arg(long)]
        noise_sd: Option<f64>,
        /// AR coefficients, comma separated (ar kind).
        #[arg(long, default_value = "0.8")]
        coeffs: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Re-render the SVG plots from an existing artifact directory.
    Plot {
        #[arg(long, default_value = "phenots-out")]
        out: PathBuf,
    },
}

fn load(args: &RunArgs) -> anyhow::Result<Config> {
    let mut config = Config::from_path(&args.config)?;
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if args.jobs > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(args.jobs)
            .build_global()
            .context("initializing worker pool")?;
    }
    Ok(config)
}

fn write_series_csv(path: &PathBuf, ts: &phenots::signal_core::TimeSeries) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["time", "value"])?;
    for (i, v) in ts.values().iter().enumerate() {
        w.write_record([
            (i as f64 / ts.sample_rate_hz()).to_string(),
            v.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn main() {
    if let Err(err) = try_main() {
        eprintln!("error: {err:#}");
        std::process::exit(1);
    }
}

fn try_main() -> anyhow::Result<()> {
    let cli = Cli::parse();
    match cli.command {
        Command::Run(args) => {
            let config = load(&args)?;
            pipeline::run(&config, &args.out)?;
            println!("artifacts written to {}", args.out.display());
        }
        Command::Features(args) => {
            let config = load(&args)?;
            std::fs::create_dir_all(&args.out)?;
            let cohort = pipeline::load_cohort(&config, &args.out)?;
            let cohort = pipeline::preprocess(&config, cohort)?;
            pipeline::export_features(&config, &args.out, &cohort)?;
            println!("feature tables written to {}", args.out.display());
        }
        Command::Cluster(args) | Command::Dirichlet(args) => {
            // The regression fits ride along with the clustering branch.
            let config = load(&args)?;
            std::fs::create_dir_all(&args.out)?;
            let cohort = pipeline::load_cohort(&config, &args.out)?;
            let cohort = pipeline::preprocess(&config, cohort)?;
            pipeline::run_feature_branches(&config, &args.out, &cohort)?;
            println!("clustering artifacts written to {}", args.out.display());
        }
        Command::Tda(args) => {
            let config = load(&args)?;
            std::fs::create_dir_all(&args.out)?;
            let cohort = pipeline::load_cohort(&config, &args.out)?;
            let cohort = pipeline::preprocess(&config, cohort)?;
            pipeline::tda_branch(&config, &args.out, &cohort)?;
            println!("topological artifacts written to {}", args.out.display());
        }
        Command::Synth {
            kind,
            n,
            seed,
            period,
            noise_sd,
            coeffs,
            out,
        } => match kind.as_str() {
            "periodic" => {
                let ts = phenots::synthgen::gen_periodic(period, noise_sd.unwrap_or(0.6), n, seed)?;
                write_series_csv(&out, &ts)?;
            }
            "noise" => {
                let ts = phenots::synthgen::gen_white_noise(noise_sd.unwrap_or(0.8), n, seed)?;
                write_series_csv(&out, &ts)?;
            }
            "infinity" => {
                let cloud =
                    phenots::synthgen::gen_infinity_cloud(n, noise_sd.unwrap_or(0.05), seed)?;
                let mut w = csv::Writer::from_path(&out)?;
                w.write_record(["x", "y"])?;
                for p in cloud.iter_points() {
                    w.write_record([p[0].to_string(), p[1].to_string()])?;
                }
                w.flush()?;
            }
            "ar" => {
                let coeffs: Vec<f64> = coeffs
                    .split(',')
                    .map(|c| c.trim().parse::<f64>())
                    .collect::<Result<_, _>>()
                    .context("parsing --coeffs")?;
                let ts = phenots::synthgen::gen_ar(&coeffs, n, seed, 500)?;
                write_series_csv(&out, &ts)?;
            }
            other => anyhow::bail!("unknown synth kind {other} (periodic|noise|infinity|ar)"),
        },
        Command::Plot { out } => {
            let written = pipeline::emit_plots(&out)?;
            anyhow::ensure!(
                !written.is_empty(),
                "no pipeline outputs found in {}",
                out.display()
            );
            for path in written {
                println!("wrote {}", path.display());
            }
        }
    }
    Ok(())
}
