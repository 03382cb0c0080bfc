use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use noma_core::cli_io::{run, Command};

/// Spectral-efficiency analysis and user pairing for two-user NOMA clusters.
#[derive(Debug, Parser)]
#[command(name = "noma", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(&cli.command).and_then(|rendered| match rendered.output {
        Some(path) => std::fs::write(path, &rendered.bytes).map_err(Into::into),
        None => std::io::stdout()
            .write_all(&rendered.bytes)
            .map_err(Into::into),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
