//! Scenario files, the built-in examples and report output for the
//! `slantcheck` command line tool.

pub mod builtin;
pub mod config;
pub mod expr;
pub mod report;
pub mod runner;

pub use config::{load_scenario, parse_scenario, ConfigError, ScenarioConfig};
pub use expr::{parse_expr, Expr, ParseError};
pub use report::{emit, Format, Report};
pub use runner::{run_scenario, run_structure_checks};
