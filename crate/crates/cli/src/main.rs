//! Command-line frontend for reproducible batch runs: statistics with
//! bootstrap bands on point-cloud CSVs, coverage experiments on the
//! built-in distributions, and library self-checks. Every command writes
//! a manifest alongside its outputs; re-running with the parameters in a
//! manifest reproduces the outputs byte for byte, independent of the
//! thread count.

mod commands;
mod manifest;

use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;
use tdaboot::{BandwidthRule, ComplexKind, DistributionId, ResampleMethod};

#[derive(Parser)]
#[command(name = "tdaboot", version, about = "Stabilizing topological statistics with bootstrap confidence bands")]
struct Cli {
    /// Worker threads. Defaults to the logical core count; the
    /// TDABOOT_THREADS environment variable overrides this flag.
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a statistic on a point-cloud CSV and attach bootstrap bands.
    Analyze(AnalyzeArgs),
    /// Estimate coverage of bootstrap bands for a built-in distribution.
    Simulate(SimulateArgs),
    /// Run a library self-check and print its report as JSON.
    Diagnose(DiagnoseArgs),
}

/// Statistic kinds exposed on the command line.
#[derive(Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
enum StatKind {
    /// Persistent Betti numbers at --pairs.
    Pbn,
    /// Betti curve over --grid.
    Betti,
    /// Euler characteristic curve over --grid.
    Euler,
    /// Truncated Euler characteristic curve over --grid.
    TruncEuler,
    /// Diameter-bounded persistent Betti numbers at --pairs.
    BoundedPbn,
    /// Total edge length of the k-nearest-neighbor graph.
    Knn,
}

impl StatKind {
    /// The spelling the --stat flag accepts.
    fn flag_name(self) -> &'static str {
        match self {
            StatKind::Pbn => "pbn",
            StatKind::Betti => "betti",
            StatKind::Euler => "euler",
            StatKind::TruncEuler => "trunc-euler",
            StatKind::BoundedPbn => "bounded-pbn",
            StatKind::Knn => "knn",
        }
    }
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Input CSV, one point per row.
    #[arg(long)]
    input: PathBuf,

    /// Complex builder for homological statistics.
    #[arg(long, default_value = "vr")]
    complex: ComplexKind,

    #[arg(long, value_enum)]
    stat: StatKind,

    /// Homology degree.
    #[arg(long, default_value_t = 1)]
    q: usize,

    /// Comma-separated birth:death query pairs, e.g. 3.03:3.28.
    #[arg(long)]
    pairs: Option<String>,

    /// Radius grid start:end:count, e.g. 3:30:28.
    #[arg(long)]
    grid: Option<String>,

    /// Chain diameter bound for bounded-pbn.
    #[arg(long)]
    bound: Option<f64>,

    /// Neighbor count for knn.
    #[arg(long, default_value_t = 1)]
    k: usize,

    /// Count each directed knn edge instead of deduplicating.
    #[arg(long)]
    directed: bool,

    /// Rescale the cloud by n^(1/d) before evaluating.
    #[arg(long)]
    scale_by_n: bool,

    /// Band coverage level.
    #[arg(long, default_value_t = 0.95)]
    level: f64,

    /// Bootstrap replicates B.
    #[arg(long, default_value_t = 200)]
    replicates: usize,

    #[arg(long, default_value = "silverman")]
    bandwidth: BandwidthRule,

    /// Resampling method: smoothed (kernel density) or standard.
    #[arg(long, default_value = "smoothed")]
    method: ResampleMethod,

    /// Percentile pointwise interval instead of the basic one.
    #[arg(long)]
    percentile: bool,

    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Directory for result.json, curve.csv, and manifest.json.
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Args)]
struct SimulateArgs {
    /// Distribution id F1..F7.
    #[arg(long)]
    dist: DistributionId,

    /// Homology degree.
    #[arg(long, default_value_t = 1)]
    q: usize,

    /// Comma-separated birth:death query pairs.
    #[arg(long)]
    pairs: String,

    /// Base sample size.
    #[arg(long)]
    n: usize,

    /// Coverage replications N.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    reps: u64,

    /// Bootstrap replicates B.
    #[arg(long, default_value_t = 200)]
    boot: usize,

    #[arg(long, default_value_t = 0.95)]
    level: f64,

    #[arg(long, default_value = "vr")]
    complex: ComplexKind,

    #[arg(long, default_value = "silverman")]
    bandwidth: BandwidthRule,

    #[arg(long, default_value = "smoothed")]
    method: ResampleMethod,

    /// Percentile pointwise interval instead of the basic one.
    #[arg(long)]
    percentile: bool,

    /// Monte Carlo sample count for the ground-truth mean.
    #[arg(long, default_value_t = 1000)]
    truth_n: usize,

    /// Seed for the whole experiment; required so runs are reproducible.
    #[arg(long)]
    seed: u64,

    /// Directory for coverage.csv and manifest.json.
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

/// Self-checks exposed by diagnose.
#[derive(Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
enum CheckKind {
    /// Empirical stabilization radii against the locality limit.
    Radii,
    /// Structural conditions K1, K2, D1, D2 of the complex builder.
    Conditions,
    /// Mean unique fraction of standard resamples.
    UniqueFraction,
}

/// Statistics with a proven locality radius.
#[derive(Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
enum RadiiStat {
    /// Bounded persistent Betti numbers; limit 2 * bound.
    BoundedPbn,
    /// Truncated Euler characteristic; limit 2 * max grid radius.
    TruncEuler,
}

#[derive(Args)]
struct DiagnoseArgs {
    #[arg(long, value_enum)]
    check: CheckKind,

    /// Statistic for the radii check.
    #[arg(long, value_enum, default_value = "bounded-pbn")]
    stat: RadiiStat,

    /// Chain diameter bound for the bounded-pbn radii check.
    #[arg(long, default_value_t = 1.0)]
    bound: f64,

    /// Homology degree for the radii check.
    #[arg(long, default_value_t = 1)]
    q: usize,

    /// Trials for the radii check.
    #[arg(long, default_value_t = 200)]
    trials: usize,

    /// Points per trial cloud (radii, conditions) or resample size
    /// (unique-fraction).
    #[arg(long, default_value_t = 25)]
    n: usize,

    /// Complex builder for the conditions check.
    #[arg(long, default_value = "vr")]
    complex: ComplexKind,

    /// Resamples averaged by the unique-fraction check.
    #[arg(long, default_value_t = 50)]
    resamples: usize,

    #[arg(long, default_value_t = 0)]
    seed: u64,
}

/// Command outcomes map onto the exit-code contract: 0 success, 1 data or
/// runtime error, 2 usage error. Clap reports flag-level problems with
/// exit code 2 on its own.
#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Data(#[from] tdaboot::Error),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

type CliResult<T> = std::result::Result<T, CliError>;

fn usage(message: impl Into<String>) -> CliError {
    CliError::Usage(message.into())
}

fn configure_threads(flag: Option<usize>) -> CliResult<()> {
    let threads = match std::env::var("TDABOOT_THREADS") {
        Ok(raw) => Some(raw.parse::<usize>().map_err(|_| {
            usage(format!("TDABOOT_THREADS must be a positive integer, got '{raw}'"))
        })?),
        Err(_) => flag,
    };
    if let Some(t) = threads {
        if t == 0 {
            return Err(usage("thread count must be positive"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .expect("global thread pool configured twice");
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let run = configure_threads(cli.threads).and_then(|()| match cli.command {
        Command::Analyze(args) => commands::analyze(&args),
        Command::Simulate(args) => commands::simulate(&args),
        Command::Diagnose(args) => commands::diagnose(&args),
    });
    match run {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            match err {
                CliError::Usage(_) => ExitCode::from(2),
                CliError::Data(_) | CliError::Io(_) => ExitCode::from(1),
            }
        }
    }
}
