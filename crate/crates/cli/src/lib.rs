//! File formats, reports and the command-line front end for the stick
//! juggling simulator in `juggle-core`.

pub mod config;
pub mod error;
pub mod export;
pub mod reports;

pub use config::{load_config, parse_config, Overrides};
pub use error::{CliError, CliResult};
pub use export::{export_run, Artifacts, RunSummary, StepRow, TrajectoryRow};

/// Environment variable that supplies `--out-dir`.
pub const OUT_DIR_ENV: &str = "JUGGLE_OUT_DIR";
