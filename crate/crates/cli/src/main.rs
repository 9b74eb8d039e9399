//! `tarclust`: mechanism-based clustering of time-series panels.
//!
//! Exit codes: 0 success, 1 output failure, 2 configuration error,
//! 3 input (ingestion) error, 4 estimation failure.

mod args;
mod commands;
mod error;
mod output;
mod svg;

use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = args::Cli::parse();
    match commands::run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
