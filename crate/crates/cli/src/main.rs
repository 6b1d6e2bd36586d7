//! `mubqct` command-line front end.
//!
//! Exit codes: 0 success, 1 usage, 2 verification failure, 3 capability
//! cap, 4 I/O.

mod args;
mod commands;
mod config;
mod error;

use std::process::ExitCode;

use clap::{CommandFactory, Parser};

use crate::args::Cli;

fn main() -> ExitCode {
    let argv = match config::merge(std::env::args_os().collect(), &Cli::command()) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("mubqct: {e}");
            return e.exit_code();
        }
    };
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("mubqct: {e}");
            e.exit_code()
        }
    }
}
