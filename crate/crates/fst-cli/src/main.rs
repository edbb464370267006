use std::process::ExitCode;

use clap::Parser;

use fst_cli::cli::{Cli, Command};
use fst_cli::commands::{cmd_spectrum, cmd_stylize, cmd_verify};

fn main() -> ExitCode {
    // FST_THREADS caps worker threads; the library reads it too, but the CLI
    // rejects malformed values instead of ignoring them.
    if let Ok(raw) = std::env::var("FST_THREADS") {
        match raw.parse::<usize>() {
            Ok(n) if n >= 1 => fst_core::parallel::set_thread_cap(n),
            _ => {
                eprintln!("fst: FST_THREADS must be a positive integer, got {raw:?}");
                return ExitCode::from(2);
            }
        }
    }

    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Stylize(args) => cmd_stylize(args).map(|_| 0),
        Command::Verify(args) => cmd_verify(args).map(|ok| if ok { 0 } else { 1 }),
        Command::Spectrum(args) => cmd_spectrum(args).map(|_| 0),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("fst: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
