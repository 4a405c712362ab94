//! Command-line front end: `generate`, `verify`, `mesh`, `geodesic`,
//! `sweep` and `cylinder`.
//!
//! Exit codes: 0 success, 1 file errors, 2 invalid input, 3 numerical
//! failure (a profile or geodesic stopped before the requested end, or a
//! verification bound was missed).

use std::ffi::OsString;

use clap::{Parser, Subcommand};

mod commands;
pub mod config;
pub mod io;

pub use config::RunOptions;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Numerical(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) => 1,
            CliError::Validation(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "umbilic",
    version,
    about = "Totally umbilical invariant surfaces in warped products"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Integrate a profile curve and write it as CSV.
    Generate(RunOptions),
    /// Re-check a profile CSV: unit speed, first integral, umbilicity.
    Verify(RunOptions),
    /// Sweep a profile by its isometry group and write OBJ or CSV.
    Mesh(RunOptions),
    /// Integrate an ambient geodesic and report its conserved quantities.
    Geodesic(RunOptions),
    /// Integrate one profile per c0 in parallel and tabulate the residuals.
    Sweep(RunOptions),
    /// Curvatures of vertical cylinders over a curve of the fiber.
    Cylinder(RunOptions),
}

/// Runs the command line `argv` (program name first) and returns the
/// process exit code.
pub fn run_cli<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match commands::run(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
