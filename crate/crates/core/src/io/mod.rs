//! Scenario files in, CSV and JSON results out.

pub mod output;
pub mod scenario;

pub use output::{write_outputs, RunSummary};
pub use scenario::{parse_scenario, write_scenario, Scenario, ScenarioError, ScenarioFile};
