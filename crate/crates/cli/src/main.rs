//! `malle`: counting invariants, local factors, Euler products, abelian
//! field counts and verification suites from the command line.

mod commands;
mod config;
mod error;
mod output;
mod resolve;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::CliError;

#[derive(Parser, Debug)]
#[command(name = "malle", version, about = "Malle-type counting invariants and empirical checks")]
struct Cli {
    /// `key = value` file; entries fill in MALLE_* variables not already set.
    #[arg(long, global = true, env = "MALLE_CONFIG")]
    config: Option<PathBuf>,

    /// Append each result as one JSON line to this file.
    #[arg(long, global = true, env = "MALLE_LOG")]
    log: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct GroupArgs {
    /// Catalog name (C2, C3, C4, V4-regular, S3, D4, S4, kluners) or a group JSON file.
    #[arg(long, env = "MALLE_GROUP")]
    pub group: Option<String>,

    /// Abelian normal subgroup T: catalog label, generators like "(1 2 3),(4 5 6)", or a JSON file.
    #[arg(long, env = "MALLE_NORMAL")]
    pub normal: Option<String>,

    /// Twist preset (trivial, trivial-pi-over-Q, conjugation-only, full-over-Q,
    /// kluners-split, kluners-nonsplit) or a twist JSON file.
    #[arg(long, env = "MALLE_ACTION")]
    pub action: Option<String>,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
pub enum Ordering {
    Disc,
    Ram,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// a(T), the twisted b, Türkelli's B and Malle's b(ℚ, G).
    Invariants(GroupArgs),

    /// Local Euler factors and cohomology sizes at tame classes.
    LocalFactor(commands::LocalFactorArgs),

    /// Leading exponents, the regularized product G(s) and the Delange main term.
    Euler(commands::EulerArgs),

    /// Count homomorphisms from the Galois group of ℚ to an abelian group.
    Count(commands::CountArgs),

    /// Möbius function on the cyclic-subgroup poset.
    Mobius(commands::MobiusArgs),

    /// Wiles' Selmer ratio, or coefficients for synthetic local data.
    WilesEval(commands::WilesArgs),

    /// Run a verification suite over the catalog.
    Verify(commands::VerifyArgs),
}

fn run() -> Result<(), CliError> {
    let args: Vec<String> = std::env::args().collect();
    if let Some(path) = config::locate(&args) {
        config::apply(std::path::Path::new(&path))?;
    }
    let cli = Cli::parse_from(&args);
    let (name, outcome) = match &cli.command {
        Command::Invariants(a) => ("invariants", commands::invariants(a)),
        Command::LocalFactor(a) => ("local-factor", commands::local_factor(a)),
        Command::Euler(a) => ("euler", commands::euler(a)),
        Command::Count(a) => ("count", commands::count(a)),
        Command::Mobius(a) => ("mobius", commands::mobius(a)),
        Command::WilesEval(a) => ("wiles-eval", commands::wiles_eval(a)),
        Command::Verify(a) => ("verify", commands::verify(a)),
    };
    let outcome = outcome?;
    print!("{}", output::render(&outcome.value));
    if let Some(path) = &cli.log {
        output::append_log(path, name, &outcome.value)?;
    }
    match outcome.failure {
        Some(message) => Err(CliError::verification(message)),
        None => Ok(()),
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code)
        }
    }
}
