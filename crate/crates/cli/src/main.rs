use std::process::ExitCode;

use clap::Parser;
use warped_cli::{run, Cli};

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("warped: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
