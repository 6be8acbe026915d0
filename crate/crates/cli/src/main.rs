//! `a2bcd-bench`: command-line front end for the a2bcd solvers.

mod args;
mod commands;
mod config;
mod error;
mod output;
mod problem;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};
use error::CliResult;

fn dispatch(cli: &Cli) -> CliResult<()> {
    match &cli.command {
        Command::Solve(a) => commands::solve::run(a),
        Command::Dryrun(a) => commands::dryrun::run(a),
        Command::Lowerbound(a) => commands::lowerbound::run(a),
        Command::Ode(a) => commands::ode::run(a),
        Command::Compare(a) => commands::compare::run(a),
    }
}

fn main() -> ExitCode {
    let argv = match config::expand(std::env::args_os().collect()) {
        Ok(argv) => argv,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            if let Some(path) = cli.command.config_file() {
                eprintln!("error: {e} (config {})", path.display());
            } else {
                eprintln!("error: {e}");
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
