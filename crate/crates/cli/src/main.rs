//! `ufscov`: generate test data, measure coverage, select features and
//! evaluate the selection from the command line.
//!
//! Exit codes: 0 success, 1 runtime or domain error, 2 usage error.

mod commands;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{ArgGroup, Args, Parser, Subcommand};
use log::error;

use ufscov_core::{Engine, Error, Strategy};

use crate::manifest::{RunManifest, RunRecord};

#[derive(Debug, Parser)]
#[command(name = "ufscov", version, about = "Unsupervised feature selection with the coverage measure")]
struct Cli {
    /// Where to write the run manifest (default: next to the primary output).
    #[arg(long, global = true, value_name = "FILE")]
    manifest: Option<PathBuf>,

    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long, global = true, value_parser = clap::value_parser!(u16).range(1..))]
    threads: Option<u16>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write a reference point set or a synthetic redundant dataset as CSV.
    Generate(GenerateArgs),
    /// Print the coverage measure of a CSV file.
    Coverage(CoverageArgs),
    /// Run a feature-selection search and write its trace.
    Select(SelectArgs),
    /// Add noise to, or shuffle, some columns of a CSV file.
    Perturb(PerturbArgs),
    /// Score a selection with a k-NN classifier, or score external predictions.
    Evaluate(EvaluateArgs),
}

#[derive(Debug, Args)]
struct GenerateArgs {
    #[command(subcommand)]
    generator: Generator,
}

#[derive(Debug, Subcommand)]
enum Generator {
    /// Regular grid with `m` levels per axis.
    Grid {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        dim: usize,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Halton sequence.
    Halton {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        dim: usize,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Unscrambled Sobol sequence.
    Sobol {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        dim: usize,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Independent uniform points.
    Uniform {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        dim: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Informative features plus features derived from them.
    Redundant {
        #[arg(long)]
        n: usize,
        /// Overrides the seed of --spec; 0 when neither is given.
        #[arg(long)]
        seed: Option<u64>,
        /// JSON redundancy spec; the eight-feature butterfly layout by default.
        #[arg(long, value_name = "FILE")]
        spec: Option<PathBuf>,
        #[arg(short, long)]
        output: PathBuf,
    },
}

#[derive(Debug, Args)]
struct CoverageArgs {
    #[arg(short, long)]
    input: PathBuf,
    /// Comma-separated feature names (default: all features).
    #[arg(long, value_delimiter = ',')]
    columns: Vec<String>,
    /// Non-numeric label column to ignore.
    #[arg(long)]
    label: Option<String>,
    #[arg(long, default_value_t = Engine::Auto)]
    engine: Engine,
    /// Print the full report as JSON.
    #[arg(long)]
    json: bool,
    /// Use the data as is instead of rescaling every feature to [0, 1].
    #[arg(long)]
    no_rescale: bool,
}

#[derive(Debug, Args)]
struct SelectArgs {
    #[arg(short, long)]
    input: PathBuf,
    #[arg(long, default_value_t = Strategy::Sfs)]
    strategy: Strategy,
    /// Label column, excluded from the search.
    #[arg(long)]
    label: Option<String>,
    #[arg(long, default_value_t = Engine::Auto)]
    engine: Engine,
    /// Feature limit for the exhaustive search.
    #[arg(long, default_value_t = ufscov_core::search::EXHAUSTIVE_LIMIT)]
    max_features: usize,
    /// Also write every scored subset of an exhaustive search as CSV.
    #[arg(long, value_name = "FILE")]
    table: Option<PathBuf>,
    /// Trace JSON output.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("mode").required(true).args(["noise", "shuffle"])))]
struct PerturbArgs {
    #[arg(short, long)]
    input: PathBuf,
    /// Gaussian noise with this fraction of each column's standard deviation.
    #[arg(long, value_name = "FRACTION")]
    noise: Option<f64>,
    /// Shuffle the rows of each target column independently.
    #[arg(long)]
    shuffle: bool,
    /// Comma-separated target columns.
    #[arg(long, value_delimiter = ',', required = true)]
    columns: Vec<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    label: Option<String>,
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Debug, Args)]
struct EvaluateArgs {
    #[arg(short, long)]
    input: PathBuf,
    #[arg(long)]
    label: String,
    /// Selection trace; evaluates every prefix of its order.
    #[arg(long, value_name = "FILE", conflicts_with = "pred")]
    trace: Option<PathBuf>,
    /// CSV with predictions to score against the input labels.
    #[arg(long, value_name = "FILE")]
    pred: Option<PathBuf>,
    /// Prediction column in the --pred file (default: the label name).
    #[arg(long, requires = "pred")]
    pred_column: Option<String>,
    /// Features for a single evaluation without a trace (default: all).
    #[arg(long, value_delimiter = ',', conflicts_with_all = ["trace", "pred"])]
    columns: Vec<String>,
    #[arg(long, default_value_t = 5)]
    knn: usize,
    #[arg(long, default_value_t = 20)]
    repeats: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Training fraction of each split.
    #[arg(long, default_value_t = 0.8)]
    split: f64,
    #[arg(long)]
    no_rescale: bool,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

/// Usage errors exit with 2, everything else with 1.
fn exit_code(e: &Error) -> u8 {
    match e {
        Error::InvalidArgument(_)
        | Error::UnsupportedDimension { .. }
        | Error::SizeOverflow { .. }
        | Error::TooManyFeatures { .. }
        | Error::MissingColumn(_)
        | Error::BadTransform { .. } => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .format_timestamp(None)
        .init();
    let cli = Cli::parse();

    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t.into()).build_global() {
            error!("{e}");
            return ExitCode::from(1);
        }
    }

    let name = match &cli.command {
        Command::Generate(_) => "generate",
        Command::Coverage(_) => "coverage",
        Command::Select(_) => "select",
        Command::Perturb(_) => "perturb",
        Command::Evaluate(_) => "evaluate",
    };
    let start = Instant::now();
    let mut record = RunRecord::default();
    let outcome = match cli.command {
        Command::Generate(a) => commands::generate(a.generator, &mut record),
        Command::Coverage(a) => commands::coverage(a, &mut record),
        Command::Select(a) => commands::select(a, &mut record),
        Command::Perturb(a) => commands::perturb(a, &mut record),
        Command::Evaluate(a) => commands::evaluate(a, &mut record),
    };
    let code = match &outcome {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(e)
        }
    };

    let path = cli
        .manifest
        .unwrap_or_else(|| manifest::default_path(name, record.output.as_deref()));
    let m = RunManifest::build(name, &record, start.elapsed(), &outcome, code.into());
    if let Err(e) = m.write(&path) {
        eprintln!("error: cannot write run manifest: {e}");
        return ExitCode::from(code.max(1));
    }
    ExitCode::from(code)
}
