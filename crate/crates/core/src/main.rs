use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qrelay::cli::{execute, exit_code, parse_cards, Command, RunManifest};

#[derive(Parser)]
#[command(name = "qrelay", version, about = "Rate bounds and coding simulations for quantum relay channels")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Evaluate one bound configuration on a channel
    Eval(Flags),
    /// Depolarizing-relay grid: closed form, measure-forward, optimizer
    Sweep(Flags),
    /// Degraded / orthogonal-components / Hadamard / c-q tests
    Classify(Flags),
    /// Random codes with square-root decoding on the direct link
    Simulate(Flags),
    /// Maximize a bound over input ensembles
    Optimize(Flags),
}

#[derive(Args)]
struct Flags {
    #[arg(long)]
    channel: Option<PathBuf>,
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long)]
    restarts: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Register cardinalities, e.g. U=2,X0=2,X1=2
    #[arg(long)]
    cards: Option<String>,
    #[arg(long)]
    tol: Option<f64>,
}

fn manifest(cli: Cli) -> qrelay::Result<RunManifest> {
    let (command, f) = match cli.command {
        Cmd::Eval(f) => (Command::Eval, f),
        Cmd::Sweep(f) => (Command::Sweep, f),
        Cmd::Classify(f) => (Command::Classify, f),
        Cmd::Simulate(f) => (Command::Simulate, f),
        Cmd::Optimize(f) => (Command::Optimize, f),
    };
    Ok(RunManifest {
        command,
        channel: f.channel,
        config: f.config,
        seed: f.seed,
        restarts: f.restarts,
        out: f.out,
        cards: f.cards.as_deref().map(parse_cards).transpose()?.unwrap_or_default(),
        tol: f.tol,
    })
}

fn main() -> ExitCode {
    let result = manifest(Cli::parse()).and_then(|m| execute(&m));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
