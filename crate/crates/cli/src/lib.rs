//! Batch front end: scenario files in, CSV artifacts and run manifests out.

pub mod config;
pub mod csvio;
pub mod error;
pub mod run;
pub mod sweep;

pub use config::{override_key, parse_config, ConfigIssue, InitialData, ScenarioConfig, Task};
pub use error::CliError;
pub use run::{plan_tasks, run_scenario, RunFailure, RunManifest, RunStatus};
pub use sweep::{sweep, SweepSummary};
