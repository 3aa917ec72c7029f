use std::process::ExitCode;

use beamsplit_cli::args::Cli;
use beamsplit_cli::error::exit;
use beamsplit_cli::{run, CliError};
use clap::error::ErrorKind;
use clap::Parser;

fn main() -> ExitCode {
    let mut argv: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let err = CliError::Usage(e.to_string().trim_end().to_string());
            eprintln!("{}", err.to_json());
            return ExitCode::from(exit::INVALID_INPUT);
        }
    };
    // Echo a fixed program name so reports do not depend on the install path.
    if let Some(first) = argv.first_mut() {
        *first = "beamsplit".into();
    }
    match run(&cli, &argv) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code())
        }
    }
}
