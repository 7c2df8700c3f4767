use std::process::ExitCode;

use clap::Parser;
use oeuvre_cli::commands::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(oeuvre_cli::exit_code(&err))
        }
    }
}
