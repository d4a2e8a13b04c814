//! Command-line front end for the amplifier model: spectra, phase sweeps,
//! quadrature ellipses, squeezing and noise budgets, thresholds, fits, and
//! calibration, emitted as deterministic CSV or JSON.

mod commands;
mod config;
mod sweep;
mod table;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use config::RunConfig;
use sweep::{InnerCommand, SweepVariable};
use table::RenderContext;

#[derive(Debug)]
pub enum CliError {
    /// Bad configuration, flags, or input files (exit 2).
    Config(String),
    /// Model evaluation failure (exit 3, or 4 for fit failures).
    Model(dpa::Error),
    /// Output could not be written (exit 2).
    Io(String),
    /// A sweep point failed; the sweep aborts naming the point.
    Point {
        inner: Box<CliError>,
        variable: &'static str,
        value: f64,
    },
}

impl From<dpa::Error> for CliError {
    fn from(e: dpa::Error) -> Self {
        match e {
            dpa::Error::Config(msg) => CliError::Config(msg),
            other => CliError::Model(other),
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "{msg}"),
            CliError::Model(e) => write!(f, "{e}"),
            CliError::Io(msg) => write!(f, "{msg}"),
            CliError::Point {
                inner,
                variable,
                value,
            } => write!(f, "at {variable} = {}: {inner}", table::fmt12(*value)),
        }
    }
}

impl CliError {
    fn at_point(self, variable: &'static str, value: f64) -> CliError {
        CliError::Point {
            inner: Box::new(self),
            variable,
            value,
        }
    }

    fn model(&self) -> Option<&dpa::Error> {
        match self {
            CliError::Model(e) => Some(e),
            CliError::Point { inner, .. } => inner.model(),
            _ => None,
        }
    }

    fn slug(&self) -> &'static str {
        match self {
            CliError::Config(_) => "config",
            CliError::Io(_) => "io",
            CliError::Point { inner, .. } => inner.slug(),
            CliError::Model(e) => match e {
                dpa::Error::Domain(_) => "domain",
                dpa::Error::Config(_) => "config",
                dpa::Error::Singularity(_) => "singularity",
                dpa::Error::AboveThreshold { .. } => "above_threshold",
                dpa::Error::Bracketing(_) => "bracketing",
                dpa::Error::Extraction(_) => "extraction",
                dpa::Error::Alignment(_) => "alignment",
                dpa::Error::Aggregation(_) => "aggregation",
                dpa::Error::DegenerateInput(_) => "degenerate_input",
                dpa::Error::Fit { .. } => "fit",
            },
        }
    }

    fn code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io(_) => 2,
            CliError::Point { inner, .. } => inner.code(),
            CliError::Model(e) => match e {
                dpa::Error::Fit { .. } => 4,
                _ => 3,
            },
        }
    }

    /// One-line machine-readable error record for stderr.
    fn record(&self) -> String {
        let mut root = serde_json::Map::new();
        root.insert("error".into(), json!(self.slug()));
        root.insert("message".into(), json!(self.to_string()));
        root.insert("exit".into(), json!(self.code()));
        if let Some(dpa::Error::AboveThreshold { margin }) = self.model() {
            root.insert("margin".into(), json!(margin));
        }
        if let CliError::Point {
            variable, value, ..
        } = self
        {
            root.insert(
                "point".into(),
                json!({ "variable": variable, "value": value }),
            );
        }
        serde_json::Value::Object(root).to_string()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
struct CommonArgs {
    /// Run configuration file (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Debug, Args)]
struct GridArgs {
    /// Frequency span in Hz (gain-spectrum).
    #[arg(long)]
    span: Option<f64>,
    /// Number of evaluation points.
    #[arg(long)]
    points: Option<usize>,
}

#[derive(Debug, Parser)]
#[command(
    name = "dpasim",
    version,
    about = "Degenerate parametric amplifier modeling toolkit"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Reflection gain versus laboratory frequency around half the pump.
    GainSpectrum {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Band-center phase-sensitive gain versus pump phase.
    PhaseGain {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Quadrature ellipse (pump on and off) at the configured pump phase.
    Ellipse {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Vacuum squeezing extremes and the near-threshold plateau.
    SqueezeBudget {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Detection-chain noise budget at the operating point.
    NoiseBudget {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Self-oscillation threshold pump power.
    Threshold {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Fit a data file; the fit kind is chosen from the CSV header.
    Fit {
        /// Data file (CSV with a named header).
        data: PathBuf,
        #[command(flatten)]
        common: CommonArgs,
        /// Seed for Monte-Carlo fit restarts.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Calibrate the photon-to-watt conversion from temperature sweeps.
    Calibrate {
        /// Data file with header temp_k,gain_linear,p_on_w,p_off_w.
        data: PathBuf,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Evaluate an inner command over a swept variable, one row per point.
    Sweep {
        /// Inner command to evaluate at each point.
        #[arg(value_enum)]
        inner: InnerCommand,
        /// Variable to sweep.
        #[arg(long, value_enum)]
        variable: SweepVariable,
        /// Explicit sweep values (comma separated).
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        values: Option<Vec<f64>>,
        /// Range start (used with --stop and --steps).
        #[arg(long, allow_negative_numbers = true)]
        start: Option<f64>,
        /// Range stop (inclusive).
        #[arg(long, allow_negative_numbers = true)]
        stop: Option<f64>,
        /// Number of range points.
        #[arg(long)]
        steps: Option<usize>,
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        grid: GridArgs,
    },
}

fn main() {
    let filter = std::env::var("DPASIM_LOG").unwrap_or_else(|_| "warn".to_string());
    env_logger::Builder::new()
        .parse_filters(&filter)
        .target(env_logger::Target::Stderr)
        .init();
    if let Err(err) = run(Cli::parse()) {
        eprintln!("{}", err.record());
        std::process::exit(err.code());
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let (name, common, sha, output) = match &cli.command {
        Command::GainSpectrum { common, grid } => {
            let (resolved, sha) = load(common)?;
            (
                "gain-spectrum",
                common,
                sha,
                commands::gain_spectrum(&resolved, grid.span, grid.points)?,
            )
        }
        Command::PhaseGain { common, grid } => {
            let (resolved, sha) = load(common)?;
            (
                "phase-gain",
                common,
                sha,
                commands::phase_gain(&resolved, grid.points)?,
            )
        }
        Command::Ellipse { common, grid } => {
            let (resolved, sha) = load(common)?;
            (
                "ellipse",
                common,
                sha,
                commands::ellipse(&resolved, grid.points)?,
            )
        }
        Command::SqueezeBudget { common } => {
            let (resolved, sha) = load(common)?;
            (
                "squeeze-budget",
                common,
                sha,
                commands::squeeze_budget(&resolved)?,
            )
        }
        Command::NoiseBudget { common } => {
            let (resolved, sha) = load(common)?;
            (
                "noise-budget",
                common,
                sha,
                commands::noise_budget_cmd(&resolved)?,
            )
        }
        Command::Threshold { common } => {
            let (resolved, sha) = load(common)?;
            ("threshold", common, sha, commands::threshold(&resolved)?)
        }
        Command::Fit { data, common, seed } => {
            let (resolved, sha) = load(common)?;
            let data = commands::DataFile::load(data)?;
            ("fit", common, sha, commands::fit(&resolved, &data, *seed)?)
        }
        Command::Calibrate { data, common } => {
            let (resolved, sha) = load(common)?;
            let data = commands::DataFile::load(data)?;
            (
                "calibrate",
                common,
                sha,
                commands::calibrate(&resolved, &data)?,
            )
        }
        Command::Sweep {
            inner,
            variable,
            values,
            start,
            stop,
            steps,
            common,
            grid,
        } => {
            let (resolved, sha) = load(common)?;
            let values = sweep_values(values.as_deref(), *start, *stop, *steps)?;
            let output = sweep::run(&resolved, *inner, *variable, values, grid.span, grid.points)?;
            ("sweep", common, sha, output)
        }
    };

    let ctx = RenderContext {
        command: name,
        config_sha256: &sha,
    };
    let text = match common.format {
        Format::Csv => output.to_csv(&ctx),
        Format::Json => output.to_json(&ctx),
    };
    emit(common.out.as_deref(), &text)
}

fn load(common: &CommonArgs) -> Result<(config::Resolved, String), CliError> {
    let config = RunConfig::load(&common.config)?;
    let sha = config.sha256();
    log::debug!("config {} sha256 {sha}", common.config.display());
    Ok((config.resolve()?, sha))
}

fn sweep_values(
    values: Option<&[f64]>,
    start: Option<f64>,
    stop: Option<f64>,
    steps: Option<usize>,
) -> Result<Vec<f64>, CliError> {
    if let Some(values) = values {
        if values.is_empty() {
            return Err(CliError::Config("sweep --values is empty".into()));
        }
        if !values.iter().all(|v| v.is_finite()) {
            return Err(CliError::Config("sweep values must be finite".into()));
        }
        return Ok(values.to_vec());
    }
    match (start, stop, steps) {
        (Some(a), Some(b), Some(n)) => {
            if !(a < b) {
                return Err(CliError::Config("sweep range needs start < stop".into()));
            }
            if n < 2 {
                return Err(CliError::Config(
                    "sweep range needs at least 2 steps".into(),
                ));
            }
            Ok((0..n)
                .map(|k| a + (b - a) * k as f64 / (n - 1) as f64)
                .collect())
        }
        _ => Err(CliError::Config(
            "sweep needs --values or all of --start/--stop/--steps".into(),
        )),
    }
}

fn emit(out: Option<&std::path::Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
