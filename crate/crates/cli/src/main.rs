//! `focalset`: caustics, wavefronts and reflections from the command line.
//!
//! Every run prints one JSON summary line on stdout. Exit codes: 0 success,
//! 1 I/O failure, 2 invalid input, 3 a failed check.

mod commands;
mod config;
mod error;
mod output;
mod validate;

use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

use crate::commands::Summary;
use crate::config::{Flags, RunConfig};
use crate::error::CliResult;

#[derive(Debug, Parser)]
#[command(name = "focalset", version, about = "Focal sets of reflected light")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Focal set of the coffeecup or nephroid scenario
    Focal(#[command(flatten)] Flags),
    /// Wavefronts after reflection in a paraboloid or a cylinder
    Wavefront(#[command(flatten)] Flags),
    /// Reflect a single ray given by --xi and --eta
    Reflect(#[command(flatten)] Flags),
    /// Randomized self-checks
    Validate(#[command(flatten)] Flags),
    /// Horizontal slices of a caustic surface
    Levelset(#[command(flatten)] Flags),
}

fn run(command: &Command) -> CliResult<Summary> {
    let (flags, action): (&Flags, fn(&RunConfig) -> CliResult<Summary>) = match command {
        Command::Focal(f) => (f, commands::focal),
        Command::Wavefront(f) => (f, commands::wavefront),
        Command::Reflect(f) => (f, commands::reflect),
        Command::Validate(f) => (f, validate::validate),
        Command::Levelset(f) => (f, commands::levelset),
    };
    action(&RunConfig::resolve(flags)?)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli.command) {
        Ok(Summary { mut value, failed }) => {
            value["status"] = json!(if failed { "failed" } else { "ok" });
            println!("{value}");
            if failed {
                ExitCode::from(3)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            println!("{}", json!({ "status": "error", "error": e.to_string() }));
            ExitCode::from(e.exit_code())
        }
    }
}
