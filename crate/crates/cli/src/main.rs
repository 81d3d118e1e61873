//! `travwave`: command-line front end for the traveling wave toolkit.

mod commands;
mod config;
mod error;
mod json;
mod manifest;
mod reproduce;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::config::RunConfig;
use crate::error::CliError;
use crate::manifest::Run;

#[derive(Debug, Parser)]
#[command(
    name = "travwave",
    version,
    about = "Traveling waves of a viscous optimal-velocity traffic model"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct Common {
    /// JSON configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Flux constant K.
    #[arg(long = "K", global = true, allow_negative_numbers = true)]
    k: Option<f64>,
    /// Wave speed c.
    #[arg(long, global = true, allow_negative_numbers = true)]
    c: Option<f64>,
    /// Start headway of a periodic orbit.
    #[arg(long, global = true)]
    q: Option<f64>,
    /// Solution kind: back, front, pulse1, pulse2, periodic or hopf.
    #[arg(long, global = true)]
    kind: Option<String>,
    /// Also write SVG figures.
    #[arg(long, global = true)]
    svg: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Critical constants and the region of (K, c).
    Regions,
    /// Solve one connection by shooting in mu.
    Shoot,
    /// Speed and mu of the heteroclinic cycle at K.
    Cycle,
    /// Homoclinic orbit at (K, c).
    Pulse,
    /// Periodic orbit through (q, 0), one of a given period, or a family.
    Periodic,
    /// Continue a solution branch in c or along mu = 2 tau K - 1.
    Branch,
    /// Dispersion relation and instability map of uniform flow.
    Stability,
    /// Spectral simulation of the macroscopic model on a ring.
    SimulatePde,
    /// Car-following simulation on a ring.
    SimulateMicro,
    /// Compare the solvers against the exact cubic-system solutions.
    ValidateAcn,
    /// Regenerate the data behind a figure and check it.
    Reproduce {
        #[arg(value_enum)]
        figure: Figure,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Figure {
    Fig1,
    Fig2,
    Fig3,
    Fig4,
}

impl Command {
    fn name(&self) -> String {
        match self {
            Command::Regions => "regions".into(),
            Command::Shoot => "shoot".into(),
            Command::Cycle => "cycle".into(),
            Command::Pulse => "pulse".into(),
            Command::Periodic => "periodic".into(),
            Command::Branch => "branch".into(),
            Command::Stability => "stability".into(),
            Command::SimulatePde => "simulate-pde".into(),
            Command::SimulateMicro => "simulate-micro".into(),
            Command::ValidateAcn => "validate-acn".into(),
            Command::Reproduce { figure } => {
                format!("reproduce {}", figure.to_possible_value().expect("named").get_name())
            }
        }
    }
}

fn load_config(common: &Common) -> Result<RunConfig, CliError> {
    let mut cfg = match &common.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
            RunConfig::from_json(&text)?
        }
        None => RunConfig::default(),
    };
    if common.k.is_some() {
        cfg.k = common.k;
    }
    if common.c.is_some() {
        cfg.c = common.c;
    }
    if common.q.is_some() {
        cfg.q = common.q;
    }
    if common.kind.is_some() {
        cfg.kind = common.kind.clone();
    }
    Ok(cfg)
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("TRAVWAVE_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| CliError::Config(format!("TRAVWAVE_THREADS must be a positive integer, got {v:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Config(format!("thread pool: {e}")))
}

fn run(cli: Cli) -> Result<(), CliError> {
    configure_threads()?;
    let cfg = load_config(&cli.common)?;
    let mut run = Run::new(&cli.common.out, cli.command.name(), cfg, cli.common.svg)?;
    let outcome = match cli.command {
        Command::Regions => commands::regions(&mut run),
        Command::Shoot => commands::shoot(&mut run),
        Command::Cycle => commands::cycle(&mut run),
        Command::Pulse => commands::pulse(&mut run),
        Command::Periodic => commands::periodic(&mut run),
        Command::Branch => commands::branch(&mut run),
        Command::Stability => commands::stability(&mut run),
        Command::SimulatePde => commands::simulate_pde(&mut run),
        Command::SimulateMicro => commands::simulate_micro(&mut run),
        Command::ValidateAcn => commands::validate_acn(&mut run),
        Command::Reproduce { figure } => reproduce::reproduce(&mut run, figure),
    };
    // the manifest is written even when checks fail, so partial outputs are traceable
    let written = run.finish();
    outcome?;
    written.map(|_| ())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.diagnostic());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
