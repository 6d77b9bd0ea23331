//! `smc`: solve, check, decompose, generate, reduce and benchmark stable
//! fractional matching instances.
//!
//! Exit codes: 0 success, 1 input error, 2 enumeration cap exceeded,
//! 3 checked notion violated.

mod commands;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use smc_core::Error;

#[derive(Parser)]
#[command(
    name = "smc",
    version,
    about = "Stable fractional matchings with cardinal preferences"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve an instance for an optimal or approximate stable matching.
    Solve(commands::solve::SolveArgs),
    /// Check a matching against a stability notion.
    Check(commands::check::CheckArgs),
    /// Birkhoff-von Neumann decomposition of a matching.
    Decompose(commands::decompose::DecomposeArgs),
    /// Generate a named instance family or a random instance.
    Gen(commands::gen::GenArgs),
    /// Compile a 2P2N-3SAT formula into a hardness instance.
    Reduce(commands::reduce::ReduceArgs),
    /// Run a benchmark suite and emit CSV.
    Bench(commands::bench::BenchArgs),
}

fn exit_code_for(err: &anyhow::Error) -> u8 {
    if let Some(core) = err.downcast_ref::<Error>() {
        if matches!(core, Error::CapExceeded { .. }) {
            return 2;
        }
    }
    1
}

fn main() -> ExitCode {
    // Usage errors are input errors (exit 1); code 2 is reserved for
    // enumeration caps. Help and version keep clap's behaviour.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err)
            if matches!(
                err.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            ) =>
        {
            err.exit()
        }
        Err(err) => {
            eprint!("{err}");
            return ExitCode::from(1);
        }
    };
    let outcome = match cli.command {
        Command::Solve(args) => commands::solve::run(args),
        Command::Check(args) => commands::check::run(args),
        Command::Decompose(args) => commands::decompose::run(args),
        Command::Gen(args) => commands::gen::run(args),
        Command::Reduce(args) => commands::reduce::run(args),
        Command::Bench(args) => commands::bench::run(args),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}
