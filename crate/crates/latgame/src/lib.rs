//! Experiment harness around `latgame-core`: config parsing, artifact
//! formats, and the experiment modes exposed by the `latgame` binary.

pub mod config;
pub mod error;
pub mod experiment;
pub mod figure1;
pub mod io;
pub mod snapshots;
pub mod verify;

pub use config::{ExperimentConfig, Mode, Scheme};
pub use error::{HarnessError, Result};
pub use experiment::{run_experiment, ResolvedRun, RunSummary};

/// Fetch an optional config field that the current mode requires.
/// [`ExperimentConfig::validate_for_mode`] runs first, so a miss here is
/// an internal inconsistency, but it still surfaces as a config error.
pub(crate) fn config_value<T: Clone>(value: &Option<T>, what: &str) -> Result<T> {
    value
        .clone()
        .ok_or_else(|| HarnessError::Config(format!("missing `{what}`")))
}
