use std::process::ExitCode;

use clap::Parser;
use wsne_cli::{run, Cli};

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(outcome) => {
            print!("{}", outcome.output);
            ExitCode::from(outcome.exit_code)
        }
        Err(e) => {
            eprintln!("wsne: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
