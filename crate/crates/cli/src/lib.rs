//! Command-line front end: scenario files in, human-readable and
//! machine-readable results out.
//!
//! Exit codes: 0 pass, 1 statistical failure, 2 input error,
//! 3 unprogrammable device.

pub mod commands;
pub mod format;
pub mod scenario;

pub use commands::{run, Cli, EXIT_INPUT_ERROR, EXIT_OK, EXIT_STATISTICAL, EXIT_UNPROGRAMMABLE};
