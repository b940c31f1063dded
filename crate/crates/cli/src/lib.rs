//! Scenario files, run orchestration and artifact writers for `hylab`.

pub mod config;
pub mod csv;
pub mod manifest;
pub mod plot;
pub mod report;
pub mod run;
pub mod snapshot;

pub use config::{load_scenario, parse_scenario, ConfigError, ExperimentKind, ScenarioConfig};
pub use manifest::RunManifest;
pub use run::run;
