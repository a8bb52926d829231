//! Batch front end for the `dirac-nodal` solvers: configuration loading,
//! the forward / invert / roundtrip / check runs, and their file formats.

pub mod config;
pub mod csvio;
pub mod runs;

pub use config::{ConfigError, Overrides, RunConfig};
pub use runs::{run_check, run_forward, run_invert, run_roundtrip, CliError, RunOptions};
