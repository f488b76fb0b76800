//! `occtime` command-line tool. Exit codes: 0 success, 1 failed check or
//! KS comparison, 2 invalid input, 3 numerical non-convergence.

mod args;
mod checks;
mod commands;

use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = args::Cli::parse();
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("occtime: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
