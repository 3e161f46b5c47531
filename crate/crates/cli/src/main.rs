//! `numcarry`: carry propagation of numeration systems from the command line.
//!
//! Exit codes: 0 on success or when the carry propagation exists, 2 when
//! the result is undetermined or a sequence fails to converge, 1 on errors.

mod commands;
mod config;
mod output;
mod source;

use std::process::ExitCode;

use clap::Parser;

use commands::{Command, Outcome};

#[derive(Parser, Debug)]
#[command(
    name = "numcarry",
    version,
    about = "Carry propagation in numeration systems"
)]
struct Cli {
    /// `key=value` file of default flags; explicit flags win.
    #[arg(long, value_name = "FILE", global = true)]
    config: Option<std::path::PathBuf>,
    #[command(subcommand)]
    command: Command,
}

fn main() -> ExitCode {
    let args = match config::expand(std::env::args_os().collect()) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(1);
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match commands::run(cli.command) {
        Ok(Outcome::Success) => ExitCode::SUCCESS,
        Ok(Outcome::Undetermined) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
