//! `rmdp`: batch runner for the robust decision experiments.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use robust_mdp::experiments::Preset;

mod commands;
mod error;
mod output;
mod settings;

use error::{CliError, CliResult};
use output::Output;
use settings::Settings;

#[derive(Parser)]
#[command(version, about = "Robust Markov decision experiments")]
struct Cli {
    /// Run size: desk or paper.
    #[arg(long, global = true, default_value = "desk")]
    preset: String,

    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Flat key=value settings file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,

    /// Override one setting, e.g. --set omegas=0,0.5.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    overrides: Vec<String>,

    /// Worker threads; defaults to all cores.
    #[arg(long, global = true)]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Urn shrinkage payoffs and criterion optima.
    Urn,
    /// Estimate jump probabilities and solve the bus model per confidence level.
    ZurcherSolve,
    /// Fixed rules under misspecified truths, plus fleet simulation.
    Expost,
    /// Sweep true laws over the simplex and select a confidence level.
    Exante,
    /// Re-run criterion selection on a saved surface (set surface=<path>).
    Criteria,
    /// Solve a robust MDP given as JSON (set spec=<path>).
    SolveMdp,
}

fn run(cli: &Cli) -> CliResult<()> {
    let preset: Preset = cli.preset.parse().map_err(|e: robust_mdp::Error| CliError::Config(e.to_string()))?;
    if let Some(jobs) = cli.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs.max(1))
            .build_global()
            .map_err(|e| CliError::Config(e.to_string()))?;
    }
    let settings = Settings::load(preset, cli.seed, cli.config.as_deref(), &cli.overrides)?;
    let out = Output::create(&cli.out)?;
    match cli.command {
        Command::Urn => commands::urn::run(&settings, &out),
        Command::ZurcherSolve => commands::zurcher::run(&settings, &out),
        Command::Expost => commands::expost::run(&settings, &out),
        Command::Exante => commands::exante::run(&settings, &out),
        Command::Criteria => commands::criteria::run(&settings, &out),
        Command::SolveMdp => commands::mdp::run(&settings, &out),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("rmdp: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
