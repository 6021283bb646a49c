use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use siet_cli::commands;
use siet_cli::config::ScenarioConfig;
use siet_cli::CliError;

/// Finite block-length information/energy transmission bounds over AWGN:
/// scenario evaluation, figure sweeps, Monte Carlo verification.
#[derive(Parser)]
#[command(name = "siet", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate impossibility and achievability reports for one scenario.
    Bounds(CommonArgs),
    /// Sweep layer-1 probability and second-layer amplitude: energy vs rate.
    SweepFigbr(CommonArgs),
    /// Sweep DEP targets and the probability simplex: rate/energy regions.
    SweepRegions(CommonArgs),
    /// Compare Monte Carlo decoder statistics against the closed forms.
    Verify(CommonArgs),
    /// Emit the scenario's codebook in the exchange format.
    Construct(CommonArgs),
}

#[derive(clap::Args)]
struct CommonArgs {
    /// Scenario configuration file (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Output path; stdout when omitted. Existing files are overwritten.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overrides the seed from the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides the trial count from the config.
    #[arg(long)]
    trials: Option<u64>,
}

fn write_output(args: &CommonArgs, cfg: &ScenarioConfig, text: &str) -> Result<(), CliError> {
    let path = args
        .out
        .clone()
        .or_else(|| cfg.output.path.as_ref().map(PathBuf::from));
    match path {
        Some(p) => std::fs::write(&p, text)
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{text}");
            std::io::stdout()
                .flush()
                .map_err(|e| CliError::Io(e.to_string()))
        }
    }
}

fn run() -> Result<(), CliError> {
    let cli = Cli::parse();
    let args = match &cli.command {
        Command::Bounds(a)
        | Command::SweepFigbr(a)
        | Command::SweepRegions(a)
        | Command::Verify(a)
        | Command::Construct(a) => a,
    };
    let cfg = ScenarioConfig::from_path(&args.config)?;
    let seed = args.seed.unwrap_or(cfg.channel.seed);
    let trials = args.trials.unwrap_or(cfg.channel.trials);

    match &cli.command {
        Command::Bounds(_) => {
            let text = commands::cmd_bounds(&cfg)?;
            write_output(args, &cfg, &text)
        }
        Command::SweepFigbr(_) => {
            let text = commands::cmd_sweep_figbr(&cfg)?;
            write_output(args, &cfg, &text)
        }
        Command::SweepRegions(_) => {
            let text = commands::cmd_sweep_regions(&cfg)?;
            write_output(args, &cfg, &text)
        }
        Command::Verify(_) => {
            let (text, all_pass) = commands::cmd_verify(&cfg, seed, trials)?;
            write_output(args, &cfg, &text)?;
            if all_pass {
                Ok(())
            } else {
                Err(CliError::VerificationFailed)
            }
        }
        Command::Construct(_) => {
            let text = commands::cmd_construct(&cfg, seed)?;
            write_output(args, &cfg, &text)
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
