//! Scenarios bundled with the binary.

use crate::config::{parse_scenario, ConfigError, ScenarioConfig};
use crate::report::Report;
use crate::runner::run_scenario;

/// `(name, source)` for every bundled scenario. The first four are the
/// worked examples reachable through `slantcheck example`.
pub const BUNDLED: &[(&str, &str)] = &[
    ("e1", include_str!("../scenarios/example1.toml")),
    ("e2", include_str!("../scenarios/example2.toml")),
    ("e3", include_str!("../scenarios/example3.toml")),
    ("e4", include_str!("../scenarios/example4.toml")),
    ("family3", include_str!("../scenarios/family3.toml")),
    ("product", include_str!("../scenarios/product.toml")),
    ("chain3", include_str!("../scenarios/chain3.toml")),
    ("rotated", include_str!("../scenarios/rotated.toml")),
];

pub const EXAMPLES: [&str; 4] = ["e1", "e2", "e3", "e4"];

pub fn source(name: &str) -> Option<&'static str> {
    BUNDLED.iter().find(|(n, _)| *n == name).map(|(_, s)| *s)
}

pub fn load_builtin(name: &str) -> Result<ScenarioConfig, ConfigError> {
    let text = source(name).ok_or_else(|| ConfigError::Invalid {
        key: "example".into(),
        message: format!(
            "unknown scenario '{name}' (expected one of {})",
            BUNDLED
                .iter()
                .map(|(n, _)| *n)
                .collect::<Vec<_>>()
                .join(", ")
        ),
    })?;
    parse_scenario(text)
}

/// Runs a bundled scenario on its default grids.
pub fn run_builtin(name: &str) -> Result<Report, ConfigError> {
    Ok(run_scenario(&load_builtin(name)?))
}
