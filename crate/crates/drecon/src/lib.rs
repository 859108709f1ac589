//! File formats, batch reporting and the command-line driver for
//! `drecon-core`.

pub mod cli;
pub mod error;
pub mod io;
pub mod report;

pub use error::{CliError, ExitCode};
