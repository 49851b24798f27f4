//! `specdisc`: solve, verify, replay and benchmark matrix discrepancy instances.
//!
//! Exit status is 0 when every check passes, 1 when a check fails (the report
//! is still written) and 2 on bad input.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{CommonArgs, RunConfig};

#[derive(Parser, Debug)]
#[command(name = "specdisc", version, about = "Matrix discrepancy laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Exact and greedy discrepancy of an instance file, with the bound menu
    Solve {
        #[arg(long)]
        instance: PathBuf,
        /// Restrict to these solvers (repeatable); all registered solvers by default
        #[arg(long)]
        solver: Vec<String>,
    },
    /// Run a seeded verification suite
    Verify {
        /// Suite name; `list` prints the registry
        suite: String,
    },
    /// Replay the barrier walk on a rank-one instance (normalized first)
    Replay {
        #[arg(long)]
        instance: PathBuf,
    },
    /// Frame families
    Frames {
        #[command(subcommand)]
        action: FramesCommand,
    },
    /// Time the solvers on a seeded sweep
    Bench,
}

#[derive(Subcommand, Debug)]
enum FramesCommand {
    /// Harmonic unit-norm tight frame as a Rademacher instance file (needs --n and --d)
    Gen,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match RunConfig::resolve(&cli.common) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    if let Some(t) = cfg.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
        {
            eprintln!("error: cannot configure {t} threads: {e}");
            return ExitCode::from(2);
        }
    }
    let result = match &cli.command {
        Command::Solve { instance, solver } => commands::solve(&cfg, instance, solver),
        Command::Verify { suite } => commands::verify(&cfg, suite),
        Command::Replay { instance } => commands::replay(&cfg, instance),
        Command::Frames {
            action: FramesCommand::Gen,
        } => commands::frames_gen(&cfg),
        Command::Bench => commands::bench(&cfg),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
