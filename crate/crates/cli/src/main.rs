use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    let cli = sandpile_cli::Cli::parse();
    match sandpile_cli::run(cli) {
        Ok(status) => ExitCode::from(status as u8),
        Err(err) => {
            eprintln!("sandpile: {}", err.message);
            ExitCode::from(err.status as u8)
        }
    }
}
