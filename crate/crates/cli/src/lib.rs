//! Command-line front end for LR numbers.
//!
//! The binary is a thin wrapper over [`main_with`]; the pieces live here so
//! they can be tested in-process.

use std::ffi::OsString;
use std::io::Write;

use clap::Parser;

pub mod args;
pub mod checkpoint;
pub mod commands;
pub mod render;


pub use commands::{run, Outcome};

/// Exit statuses: success, usage or IO error, bound or Robin failure.
pub const EXIT_OK: u8 = 0;
pub const EXIT_ERROR: u8 = 1;
pub const EXIT_FAILURE: u8 = 2;

/// Parses `args` (program name first), runs the command and returns the
/// process exit status.
pub fn main_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match args::Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            // --help and --version land here too and are not errors
            if e.use_stderr() {
                let _ = write!(err, "{e}");
                return EXIT_ERROR;
            }
            let _ = write!(out, "{e}");
            return EXIT_OK;
        }
    };
    match run(&cli, out, err) {
        Ok(Outcome::Pass) => EXIT_OK,
        Ok(Outcome::Fail) => EXIT_FAILURE,
        Err(e) => {
            let _ = writeln!(err, "error: {e:#}");
            EXIT_ERROR
        }
    }
}
