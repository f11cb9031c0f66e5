//! Command-line front end for the spinsync toolkit: model files in and out,
//! bound reports, experiments, fuzzing, all with explicit seeds and budgets.
//!
//! Exit-status contract: 0 success (a reported finding or an inapplicable
//! bound is still success), 2 input error, 3 budget exceeded.

pub mod args;
pub mod commands;
pub mod error;
pub mod modelfile;
pub mod output;

pub use error::{CliError, ExitCode};

/// Runs a parsed command, returning the process exit code.
pub fn run(cli: args::Cli) -> ExitCode {
    let result = match cli.command {
        args::Command::Info(a) => commands::info::run(a),
        args::Command::Bounds(a) => commands::bounds::run(a),
        args::Command::Sp(a) => commands::sp::run(a),
        args::Command::Experiment(a) => commands::experiment::run(a),
        args::Command::Fuzz(a) => commands::fuzz::run(a),
        args::Command::Make(a) => commands::make::run(a),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e:#}");
            e.exit_code()
        }
    }
}
