//! Scenario documents: UTF-8 JSON per `schema/scenario.json`, loaded with
//! defaults applied, emitted canonically (key-sorted) and content-hashed.

use geodes_core::scenario::{validate_scenario, ScenarioConfig, ValidatedScenario, Violation};
use sha2::{Digest, Sha256};
use std::fmt;

#[derive(Debug)]
pub enum LoadError {
    /// Malformed document, unknown field or type mismatch, with locus.
    Parse { line: usize, column: usize, message: String },
}

impl fmt::Display for LoadError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LoadError::Parse { line, column, message } => {
                write!(f, "parse error at line {line}, column {column}: {message}")
            }
        }
    }
}

impl std::error::Error for LoadError {}

/// Parses a scenario document, applying documented defaults for omitted
/// optional fields. Unknown fields are rejected.
pub fn load_scenario(text: &str) -> Result<ScenarioConfig, LoadError> {
    serde_json::from_str(text).map_err(|e| LoadError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

/// Canonical document: key-sorted compact JSON. `load_scenario` of the output
/// reproduces the config exactly.
pub fn emit_scenario(cfg: &ScenarioConfig) -> String {
    let value = serde_json::to_value(cfg).expect("scenario serializes");
    serde_json::to_string_pretty(&value).expect("value renders")
}

/// Content hash of the canonical form; changes iff the scenario content does.
pub fn scenario_digest(cfg: &ScenarioConfig) -> String {
    let canonical = serde_json::to_string(
        &serde_json::to_value(cfg).expect("scenario serializes"),
    )
    .expect("value renders");
    hex::encode(Sha256::digest(canonical.as_bytes()))
}

/// Load + validate in one step, as the CLI consumes it.
pub fn load_validated(text: &str) -> Result<ValidatedScenario, ScenarioError> {
    let cfg = load_scenario(text).map_err(ScenarioError::Load)?;
    validate_scenario(&cfg).map_err(ScenarioError::Invalid)
}

#[derive(Debug)]
pub enum ScenarioError {
    Load(LoadError),
    Invalid(Vec<Violation>),
}

impl fmt::Display for ScenarioError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScenarioError::Load(e) => write!(f, "{e}"),
            ScenarioError::Invalid(violations) => {
                writeln!(f, "scenario failed validation:")?;
                for v in violations {
                    writeln!(f, "  - {v}")?;
                }
                Ok(())
            }
        }
    }
}

impl std::error::Error for ScenarioError {}
