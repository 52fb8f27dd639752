//! Command-line front end: figure datasets as CSV or JSON, and single-shot
//! evaluation of the one- and two-stage schemes.

use std::collections::BTreeMap;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

pub mod figures;
pub mod output;
pub mod run;

pub use figures::{compute, Dataset, FigureName, FigureRequest, Param};
pub use run::{evaluate, Reflectivity, RunRequest};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Model(#[from] carburettor::Error),
    #[error("figure {figure} does not accept `{key}` (accepted: {allowed})")]
    UnknownParam {
        figure: FigureName,
        key: String,
        allowed: String,
    },
    #[error("{key} = {value} is outside {domain}")]
    InvalidParam {
        key: &'static str,
        value: f64,
        domain: &'static str,
    },
    #[error("{0}")]
    Usage(String),
    #[error("cannot write {}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "carburettor", version, about = "Heralded photon addition on coherent states")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a figure dataset.
    Figure(FigureArgs),
    /// Evaluate one configuration and print JSON.
    Run(RunArgs),
}

#[derive(Debug, clap::Args)]
#[command(allow_negative_numbers = true)]
pub struct FigureArgs {
    pub name: FigureName,
    /// Upper end of the α sweep.
    #[arg(long)]
    pub alpha_max: Option<f64>,
    /// Detector efficiency.
    #[arg(long)]
    pub eta: Option<f64>,
    /// Beamsplitter reflection probability |r|².
    #[arg(long)]
    pub r_sq: Option<f64>,
    /// Sweep intervals, points per axis, or largest photon number.
    #[arg(long)]
    pub grid: Option<usize>,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
}

impl From<FigureArgs> for FigureRequest {
    fn from(a: FigureArgs) -> Self {
        let mut params = BTreeMap::new();
        let given = [
            (Param::AlphaMax, a.alpha_max),
            (Param::Eta, a.eta),
            (Param::RSq, a.r_sq),
            (Param::Grid, a.grid.map(|g| g as f64)),
        ];
        for (p, v) in given {
            if let Some(v) = v {
                params.insert(p.key().to_owned(), v);
            }
        }
        FigureRequest {
            figure: a.name,
            params,
            out_path: a.out,
            format: a.format,
        }
    }
}

fn parse_reflectivity(s: &str) -> Result<Reflectivity, String> {
    if s == "opt" {
        return Ok(Reflectivity::Opt);
    }
    s.parse()
        .map(Reflectivity::Value)
        .map_err(|_| format!("expected a number or `opt`, got `{s}`"))
}

#[derive(Debug, clap::Args)]
#[command(allow_negative_numbers = true)]
pub struct RunArgs {
    /// Coherent amplitude (real).
    #[arg(long)]
    pub alpha: f64,
    /// First beamsplitter |r|², or `opt`.
    #[arg(long, value_parser = parse_reflectivity)]
    pub r_sq: Reflectivity,
    /// Detector efficiency.
    #[arg(long)]
    pub eta: f64,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(1..=2))]
    pub stages: u8,
    /// Second beamsplitter |r|², with `--stages 2`.
    #[arg(long)]
    pub r2_sq: Option<f64>,
}

impl From<RunArgs> for RunRequest {
    fn from(a: RunArgs) -> Self {
        RunRequest {
            alpha: a.alpha,
            r_sq: a.r_sq,
            eta: a.eta,
            stages: a.stages,
            r2_sq: a.r2_sq,
        }
    }
}

/// Writes a figure dataset, computing it fully before touching the file
/// system.
pub fn cmd_figure(req: &FigureRequest) -> Result<(), CliError> {
    let data = compute(req)?;
    let bytes = output::render(&data, req.format)?;
    output::write_atomic(&req.out_path, &bytes)
}

/// Evaluates one configuration and returns its JSON line.
pub fn cmd_run(req: &RunRequest) -> Result<String, CliError> {
    Ok(output::to_json_line(&evaluate(req)?))
}

/// Runs a parsed command. Returns text destined for standard output.
pub fn execute(cli: Cli) -> Result<Option<String>, CliError> {
    match cli.command {
        Command::Figure(args) => cmd_figure(&args.into()).map(|()| None),
        Command::Run(args) => cmd_run(&args.into()).map(Some),
    }
}
