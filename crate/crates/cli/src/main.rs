use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use coneglow::DetectionConfig;

mod commands;
mod output;
mod spec_file;

/// Exit status when detection stays undetermined within the budget.
pub const EXIT_UNDETERMINED: u8 = 2;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Parse(String),
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Core(#[from] coneglow::Error),
}

#[derive(Debug, Parser)]
#[command(name = "coneglow", version, about = "Certify and localize eigenvectors and fixed points of nonexpansive maps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// Seed of the first trial; trial k uses seed + k.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Half-width R of the sampling box.
    #[arg(long, default_value_t = 100.0)]
    pub box_radius: f64,
    #[arg(long, default_value_t = 100_000)]
    pub max_samples: u64,
    /// Relative gap required between sorted log-ratios.
    #[arg(long, default_value_t = 1e-9)]
    pub gap_tol: f64,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl RunArgs {
    pub fn config(&self) -> DetectionConfig {
        DetectionConfig { box_radius: self.box_radius, max_samples: self.max_samples, seed: self.seed, gap_tol: self.gap_tol }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a seeded detection on a map spec.
    Detect {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, default_value_t = 1)]
        trials: u64,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Build the bounding ball (or polytope) from a confirmed report.
    Localize {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        report: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Repeat the Schoen-composition detection experiment over many trials.
    #[command(name = "reproduce-example54")]
    ReproduceExample54 {
        #[arg(long, default_value_t = 500)]
        trials: u64,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[command(flatten)]
        run: RunArgs,
    },
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("CONEGLOW_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|t| *t > 0)
        .ok_or_else(|| CliError::Invalid(format!("CONEGLOW_THREADS must be a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Invalid(format!("cannot size the worker pool: {e}")))
}

fn run(cli: Cli) -> Result<u8, CliError> {
    configure_threads()?;
    match cli.command {
        Command::Detect { spec, trials, format, run } => commands::detect(&spec, trials, format, &run),
        Command::Localize { spec, report, out } => commands::localize(&spec, &report, out.as_deref()),
        Command::ReproduceExample54 { trials, format, run } => commands::reproduce_example54(trials, format, &run),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::FAILURE } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
