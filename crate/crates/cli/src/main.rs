use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use lowrank_cli::{config, run, CliError, ExperimentKind, Options};

#[derive(Parser)]
#[command(name = "lowrank", version, about = "Low-rank Tucker and tensor-train experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decompose a sampled function in one format.
    Decompose(Common),
    /// Singular spectra of every mode unfolding, with decay fits.
    Spectrum(Common),
    /// Evaluate a rank schedule.
    Schedule(Common),
    /// Run the experiment named in the config.
    Experiment(Common),
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Overrides `seed` in the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides `cap` in the config.
    #[arg(long)]
    cap: Option<usize>,
}

fn execute(cli: Cli) -> Result<u8, CliError> {
    let (fixed, args) = match cli.command {
        Command::Decompose(a) => (Some(ExperimentKind::Decompose), a),
        Command::Spectrum(a) => (Some(ExperimentKind::Spectrum), a),
        Command::Schedule(a) => (Some(ExperimentKind::Schedule), a),
        Command::Experiment(a) => (None, a),
    };
    let cfg = config::load(&args.config)?;
    let kind = match (fixed, cfg.experiment) {
        (Some(k), Some(c)) if k != c => {
            return Err(CliError::config(
                "experiment",
                format!("config names `{}` but the subcommand is `{}`", c.as_str(), k.as_str()),
            ))
        }
        (Some(k), _) => k,
        (None, Some(c)) => c,
        (None, None) => return Err(CliError::config("experiment", "missing")),
    };
    let defaults = Options::default();
    let opts = Options {
        seed: args.seed.or(cfg.seed).unwrap_or(defaults.seed),
        cap: args.cap.or(cfg.cap).unwrap_or(defaults.cap),
    };
    let report = run(&cfg, kind, &opts)?;
    report.write(&args.out)?;
    for v in &report.violations {
        eprintln!("bound violated: {v}");
    }
    Ok(report.exit_code())
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
