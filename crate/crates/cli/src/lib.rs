//! Command-line front end for beamsplitter addition: pmf JSON and CSV formats,
//! the `convolve`, `evolve`, `check` and `density` commands, and the exit-code
//! contract (0 success, 1 identity violation, 2 invalid input, 3 numerical
//! failure).

pub mod args;
pub mod check;
pub mod commands;
pub mod error;
pub mod format;

use args::{Cli, Command};
pub use error::{CliError, Result};

/// Runs one parsed invocation. `argv` is echoed into reports.
pub fn run(cli: &Cli, argv: &[String]) -> Result<()> {
    match &cli.command {
        Command::Convolve(a) => commands::convolve(a),
        Command::Evolve(a) => commands::evolve(a),
        Command::Check(a) => check::check(a, argv),
        Command::Density(a) => commands::density(a),
    }
}
