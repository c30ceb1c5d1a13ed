//! apilab - generate benchmark MDPs, run policy-search algorithms, compute
//! concentrability coefficients, and verify performance bounds.
//!
//! Exit codes: 0 success, 1 usage or malformed input, 2 I/O failure,
//! 3 numerical invariant violation, 4 partial sweep failure, 5 bound
//! violation.

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

mod cmd_analyze;
mod cmd_generate;
mod cmd_run;
mod cmd_sweep;
mod cmd_verify;
mod common;

#[derive(Parser)]
#[command(name = "apilab", version, about = "Approximate policy iteration laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Commands,
}

#[derive(Subcommand)]
enum Commands {
    /// Generate a Garnet MDP and its feature matrix
    Generate(cmd_generate::GenerateArgs),
    /// Run one algorithm on one MDP and write its trace
    Run(cmd_run::RunArgs),
    /// Run a full parameter sweep from a JSON specification
    Sweep(cmd_sweep::SweepArgs),
    /// Compute concentrability coefficients and the ordering chain
    Analyze(cmd_analyze::AnalyzeArgs),
    /// Check every performance bound of a trace against a report
    Verify(cmd_verify::VerifyArgs),
}

fn exit_code(err: &apilab::Error) -> i32 {
    match err {
        apilab::Error::Config(_) | apilab::Error::Parse(_) | apilab::Error::Json(_) => 1,
        apilab::Error::Io(_) => 2,
        apilab::Error::Numerical(_) | apilab::Error::Invariant(_) => 3,
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            std::process::exit(code);
        }
    };
    let result = match cli.command {
        Commands::Generate(args) => cmd_generate::run(args),
        Commands::Run(args) => cmd_run::run(args),
        Commands::Sweep(args) => cmd_sweep::run(args),
        Commands::Analyze(args) => cmd_analyze::run(args),
        Commands::Verify(args) => cmd_verify::run(args),
    };
    match result {
        Ok(code) => std::process::exit(code),
        Err(err) => {
            eprintln!("error: {err}");
            std::process::exit(exit_code(&err));
        }
    }
}
