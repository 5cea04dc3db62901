//! Command-line front end: configuration files, subcommands and exit codes.

pub mod commands;
pub mod config;
pub mod error;
pub mod literal;
pub mod report;

use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::commands::Run;
use crate::config::{Assignments, ExperimentConfig};
use crate::error::{CliError, CliResult};

#[derive(Debug, Parser)]
#[command(name = "asclt", version, about = "Almost sure CLT experiments for stabilizing Poisson functionals")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, clap::Args)]
pub struct Common {
    /// Configuration file of `key = value` lines.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Replaces the configured seed list with a single seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads for the parallel backend.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Extra `key=value` assignment, applied after the file.
    #[arg(long = "override", global = true, value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Estimate E H_k and Var H_k on the k grid.
    Calibrate,
    /// Write one coupled trajectory per seed.
    Trajectory,
    /// Logarithmic averages and their distance to N(0, 1).
    Asclt,
    /// Decay of non-zero score probabilities and stabilization radii.
    Diagnose,
    /// Monte-Carlo estimates of the bound functionals.
    Bounds,
    /// Check artifact hashes and summarize the output directory.
    Report,
}

fn load_config(common: &Common) -> CliResult<ExperimentConfig> {
    let mut assignments = match &common.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
            Assignments::parse(&text).map_err(CliError::Config)?
        }
        None => Assignments::default(),
    };
    for o in &common.overrides {
        assignments.push_line(o).map_err(CliError::Config)?;
    }
    if let Some(seed) = common.seed {
        assignments.push_line(&format!("seeds = [{seed}]")).map_err(CliError::Config)?;
    }
    if let Some(out) = &common.out {
        assignments.push_line(&format!("out = {}", out.display())).map_err(CliError::Config)?;
    }
    ExperimentConfig::resolve(&assignments).map_err(CliError::Config)
}

pub fn execute(cli: &Cli) -> CliResult<()> {
    if let Some(t) = cli.common.threads {
        asclt::exec::set_threads(t);
    }
    let run = Run::new(load_config(&cli.common)?)?;
    match cli.command {
        Command::Calibrate => commands::run_calibrate(&run),
        Command::Trajectory => commands::run_trajectory_cmd(&run),
        Command::Asclt => commands::run_asclt(&run),
        Command::Diagnose => commands::run_diagnose(&run),
        Command::Bounds => commands::run_bounds(&run),
        Command::Report => report::run_report(&run),
    }
}

/// Runs the CLI on `args` (program name first) and returns the exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
