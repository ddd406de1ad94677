//! Command-line front end: argument and config-file handling, the subcommands,
//! deterministic CSV/JSON tables and the acceptance grid behind `verify`.

pub mod commands;
pub mod error;
pub mod field;
pub mod options;
pub mod output;
pub mod table;
pub mod verify;

use clap::{Parser, Subcommand};

use commands::{ilt::IltOptions, ml::MlOptions, oracle::OracleArgs, solve::SolveArgs, telegraph::TelegraphArgs};
use error::CliError;
use output::{Outcome, Target};
use verify::VerifyArgs;

#[derive(Debug, Parser)]
#[command(name = "fracrd", version, about = "Mittag-Leffler functions, fractional Laplace inversion and reaction-diffusion solves")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate E^γ_{α,β}(z).
    #[command(allow_negative_numbers = true)]
    Ml(MlOptions),
    /// Invert a fractional symbol by its series, optionally checked by Talbot.
    #[command(allow_negative_numbers = true)]
    Ilt(IltOptions),
    /// Solve the reaction-diffusion problem on a periodic grid.
    #[command(allow_negative_numbers = true)]
    Solve(SolveArgs),
    /// Fundamental solution of the fractional telegraph equation.
    #[command(allow_negative_numbers = true)]
    Telegraph(TelegraphArgs),
    /// Run the ODE or Talbot oracle directly.
    #[command(allow_negative_numbers = true)]
    Oracle(OracleArgs),
    /// Run the acceptance grid.
    Verify(VerifyArgs),
}

/// Resolves the options, validates them, computes and returns the table with
/// where it should go. Nothing is written here.
pub fn execute(command: &Command) -> Result<(Outcome, Target), CliError> {
    match command {
        Command::Ml(o) => {
            let o = o.resolve()?;
            Ok((commands::ml::run(&o)?, o.target()))
        }
        Command::Ilt(o) => {
            let o = o.resolve()?;
            Ok((commands::ilt::run(&o)?, o.target()))
        }
        Command::Solve(o) => {
            let o = o.resolve()?;
            Ok((commands::solve::run(&o)?, o.target()))
        }
        Command::Telegraph(o) => {
            let o = o.resolve()?;
            Ok((commands::telegraph::run(&o)?, o.target()))
        }
        Command::Oracle(o) => {
            let o = o.resolve()?;
            Ok((commands::oracle::run(&o)?, o.target()))
        }
        Command::Verify(o) => {
            let o = o.resolve()?;
            Ok((verify::run(&o)?, o.target()))
        }
    }
}

/// Full run with output and messages; returns the process exit code.
pub fn main_with(cli: &Cli) -> i32 {
    let result = execute(&cli.command).and_then(|(outcome, target)| {
        output::emit(&outcome.table, &target)?;
        Ok(outcome)
    });
    match result {
        Ok(outcome) => {
            for note in &outcome.notes {
                eprintln!("note: {note}");
            }
            for flag in &outcome.flags {
                eprintln!("flag: {flag}");
            }
            outcome.exit_code()
        }
        Err(e) => {
            eprintln!("{}", e.line());
            e.exit_code()
        }
    }
}
