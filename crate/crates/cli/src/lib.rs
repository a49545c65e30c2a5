//! Command implementations behind the `safety-first` binary.

pub mod counterexample;
pub mod error;
pub mod format;
pub mod input;
pub mod rank;
pub mod term;

pub use error::{CliError, CliResult};
