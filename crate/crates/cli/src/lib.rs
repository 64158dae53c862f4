//! Front end for `hpd-core`: matrix files, plot-ready CSV export, run
//! reports and the built-in demo presets. The `hpd` binary is a thin clap
//! layer over this crate.

pub mod demo;
pub mod error;
pub mod export;
pub mod format;
pub mod io;
pub mod report;

pub use error::CliError;
