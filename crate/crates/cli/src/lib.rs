//! Library half of the `cavcorr` binary: run specs, figure presets and output.

pub mod error;
pub mod figures;
pub mod run;
pub mod spec;

pub use error::{CliError, Result};
pub use spec::{parse_run_spec, RunArgs, RunSpec};
