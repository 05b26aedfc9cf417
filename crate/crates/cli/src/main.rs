//! `scmkit` command line: generate, corrupt, analyze and compare image
//! ensembles, and render report plots.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use scmkit::config::Config;
use scmkit::io::{load_any, read_text, write_text};
use scmkit::manifest::ModelId;
use scmkit::pipeline::{
    analyze_ensemble, compare_dirs, corrupt_ensemble, generate_ensemble, Assets, Corruption,
};
use scmkit::plot::{figures_from_json, write_figures};
use scmkit::Error;

const EXIT_CONFIG: u8 = 2;
const EXIT_IO: u8 = 3;
const EXIT_ANALYSIS: u8 = 4;

#[derive(Parser, Debug)]
#[command(
    name = "scmkit",
    version,
    about = "Stochastic context model image ensembles"
)]
struct Cli {
    /// Worker threads for per-image work (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// JSON file overriding analysis thresholds.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Model {
    Alphabet,
    Voronoi,
    Flag,
}

impl From<Model> for ModelId {
    fn from(m: Model) -> ModelId {
        match m {
            Model::Alphabet => ModelId::Alphabet,
            Model::Voronoi => ModelId::Voronoi,
            Model::Flag => ModelId::Flag,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ErrorKind {
    PairBreak,
    RegionCount,
    TileMove,
    TileFlip,
    ForbiddenTile,
}

impl From<ErrorKind> for Corruption {
    fn from(k: ErrorKind) -> Corruption {
        match k {
            ErrorKind::PairBreak => Corruption::PairBreak,
            ErrorKind::RegionCount => Corruption::RegionCount,
            ErrorKind::TileMove => Corruption::TileMove,
            ErrorKind::TileFlip => Corruption::TileFlip,
            ErrorKind::ForbiddenTile => Corruption::ForbiddenTile,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write `count` images and a manifest to `out`.
    Generate {
        #[arg(long, value_enum)]
        model: Model,
        #[arg(long)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Comma-separated class weights (voronoi: 4, flag: 8).
        #[arg(long, value_delimiter = ',')]
        class_mix: Option<Vec<f64>>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Copy an ensemble, injecting one error into a fraction of its images.
    Corrupt {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_enum)]
        error: ErrorKind,
        #[arg(long)]
        rate: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a model's analyzers over a directory and write a JSON report.
    Analyze {
        #[arg(long, value_enum)]
        model: Model,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Compare generated images against training images by feature family.
    Compare {
        #[arg(long)]
        train: PathBuf,
        #[arg(long)]
        gen: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Render SVG plots from a report.
    Report {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug)]
struct Failure {
    code: u8,
    error: Error,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::InvalidArgument(_) => EXIT_CONFIG,
        Error::Io { .. }
        | Error::Decode { .. }
        | Error::Dimension { .. }
        | Error::Format { .. }
        | Error::MissingFile(_)
        | Error::DuplicateFile(_) => EXIT_IO,
        Error::LengthMismatch { .. } | Error::Degenerate(_) | Error::Insufficient(_) => {
            EXIT_ANALYSIS
        }
    }
}

impl From<Error> for Failure {
    fn from(error: Error) -> Self {
        Failure {
            code: exit_code(&error),
            error,
        }
    }
}

fn config_failure(error: Error) -> Failure {
    Failure {
        code: EXIT_CONFIG,
        error,
    }
}

fn load_config(path: Option<&Path>) -> Result<Config, Failure> {
    match path {
        None => Ok(Config::default()),
        Some(p) => Config::load(p).map_err(config_failure),
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let config = load_config(cli.config.as_deref())?;
    let assets = Assets::from_config(&config).map_err(config_failure)?;
    // Resolved thresholds go into every report; --jobs does not affect outputs.
    let resolved = serde_json::to_value(&config).expect("config serializes");
    match cli.command {
        Command::Generate {
            model,
            count,
            seed,
            class_mix,
            out,
        } => {
            let m = generate_ensemble(
                model.into(),
                count,
                seed,
                class_mix.as_deref(),
                &assets,
                &out,
            )?;
            log::info!(
                "wrote {} {} images to {}",
                m.records.len(),
                m.model_id,
                out.display()
            );
        }
        Command::Corrupt {
            input,
            error,
            rate,
            seed,
            out,
        } => {
            let m = corrupt_ensemble(&input, error.into(), rate, seed, &assets, &out)?;
            let n = m.records.iter().filter(|r| r.corruption.is_some()).count();
            log::info!("corrupted {n} of {} images", m.records.len());
        }
        Command::Analyze { model, input, out } => {
            let ens = load_any(&input)?;
            let run_config = json!({
                "command": "analyze",
                "model": ModelId::from(model).as_str(),
                "in": input,
                "config": resolved,
            });
            let report = analyze_ensemble(&ens, model.into(), &config, &assets, run_config)?;
            write_text(&out, &report.to_json()?)?;
            log::info!(
                "analyzed {} images, {} excluded",
                report.images.len(),
                report.excluded.len()
            );
        }
        Command::Compare {
            train,
            gen,
            seed,
            out,
        } => {
            let run_config = json!({
                "command": "compare",
                "train": train,
                "gen": gen,
                "seed": seed,
                "config": resolved,
            });
            let report = compare_dirs(&train, &gen, &config, seed, run_config)?;
            write_text(&out, &report.to_json()?)?;
            if let Some(ks) = report.comparison.overall_ks {
                log::info!("overall KS {ks:.4}");
            }
        }
        Command::Report { input, out } => {
            let text = read_text(&input)?;
            let figures = figures_from_json(&text)?;
            let paths = write_figures(&figures, &out)?;
            log::info!("wrote {} plots to {}", paths.len(), out.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            eprintln!("error: --jobs must be at least 1");
            return ExitCode::from(EXIT_CONFIG);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.error);
            ExitCode::from(f.code)
        }
    }
}
