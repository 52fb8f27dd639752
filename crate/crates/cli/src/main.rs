use std::process::ExitCode;

use carburettor_cli::{execute, Cli};
use clap::Parser;

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(out) => {
            if let Some(line) = out {
                println!("{line}");
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
