//! Scenario front end for the twistbeam library: configuration parsing,
//! analysis execution and artifact output.

pub mod csvout;
pub mod report;
pub mod runner;
pub mod scenario;

pub use runner::{run_analysis, run_scenario, AnalysisOutcome};
pub use scenario::{parse_scenario, parse_scenario_str, Analysis, ParseError, Scenario};
