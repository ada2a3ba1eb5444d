//! Command-line front end for the cyclosync detectors.

pub mod commands;
pub mod config;
pub mod error;

use std::path::Path;

use config::ScenarioConfig;
use error::CliError;

pub const SCENARIO1_TOML: &str = include_str!("../scenarios/scenario1.toml");
pub const SCENARIO2_TOML: &str = include_str!("../scenarios/scenario2.toml");

/// Loads `name` as a file path, falling back to the bundled scenario names.
pub fn resolve_config(name: &str) -> Result<ScenarioConfig, CliError> {
    let path = Path::new(name);
    if path.exists() {
        return ScenarioConfig::load(path);
    }
    match name {
        "scenario1" => ScenarioConfig::parse(SCENARIO1_TOML),
        "scenario2" => ScenarioConfig::parse(SCENARIO2_TOML),
        _ => Err(CliError::config(format!(
            "{name}: no such file (bundled names: scenario1, scenario2)"
        ))),
    }
}
