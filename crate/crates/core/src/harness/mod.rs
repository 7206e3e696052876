//! Scenario registry, configuration, check catalog, reports and refinement
//! studies behind the command-line tool.

pub mod catalog;
pub mod config;
pub mod converge;
pub mod report;
pub mod run;
pub mod scenario;

pub use catalog::{list_checks, CatalogEntry, Outcome};
pub use config::{config_schema, ScenarioConfig, SCHEMA_VERSION};
pub use converge::{convergence_study, Axis, ConvergenceReport, Series};
pub use report::{CheckRecord, Report, Status};
pub use run::{run_scenario, RunOptions};
pub use scenario::{stream_rng, Scenario};
