//! Run configuration: parsing, defaults and validation.

use finsler::catalog;
use finsler::DiffEngine;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::checks::{applicable_checks, CHECKS};

pub const DEFAULT_SAMPLES: usize = 200;
pub const DEFAULT_TOLERANCE: f64 = 1e-6;
pub const SEED_ENV: &str = "FINSLER_SEED";

const KEYS: [&str; 7] = [
    "example",
    "checks",
    "samples",
    "seed",
    "tolerance",
    "diff_method",
    "step_scale",
];

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("unknown example `{0}`")]
    UnknownExample(String),
    #[error("unknown check `{0}`")]
    UnknownCheck(String),
    #[error("invalid config: {0}")]
    Validation(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum DiffMethodName {
    #[default]
    Analytic,
    Fd4,
}

fn default_samples() -> usize {
    DEFAULT_SAMPLES
}

fn default_tolerance() -> f64 {
    DEFAULT_TOLERANCE
}

fn default_step_scale() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub example: String,
    /// Empty means every check applicable to the example.
    #[serde(default)]
    pub checks: Vec<String>,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    #[serde(default)]
    pub diff_method: DiffMethodName,
    #[serde(default = "default_step_scale")]
    pub step_scale: f64,
}

impl RunConfig {
    pub fn new(example: impl Into<String>) -> Self {
        RunConfig {
            example: example.into(),
            checks: Vec::new(),
            samples: DEFAULT_SAMPLES,
            seed: 0,
            tolerance: DEFAULT_TOLERANCE,
            diff_method: DiffMethodName::Analytic,
            step_scale: 1.0,
        }
    }

    pub fn engine(&self) -> DiffEngine {
        let base = match self.diff_method {
            DiffMethodName::Analytic => DiffEngine::analytic(),
            DiffMethodName::Fd4 => DiffEngine::fd4(),
        };
        base.with_step_scale(self.step_scale)
    }

    /// The checks to run, with an empty list expanded to all applicable ones.
    pub fn resolved_checks(&self) -> Vec<String> {
        let mut out = if self.checks.is_empty() {
            applicable_checks(&self.example)
                .into_iter()
                .map(String::from)
                .collect()
        } else {
            self.checks.clone()
        };
        out.sort();
        out.dedup();
        out
    }

    /// Applies `FINSLER_SEED` if it is set to an integer.
    pub fn with_env_seed(mut self) -> Result<Self, ConfigError> {
        if let Ok(v) = std::env::var(SEED_ENV) {
            self.seed = v.trim().parse().map_err(|_| {
                ConfigError::Validation(format!("{SEED_ENV}=`{v}` is not an integer"))
            })?;
        }
        Ok(self)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.samples < 1 {
            return Err(ConfigError::Validation("samples must be at least 1".into()));
        }
        if !(self.tolerance > 0.0 && self.tolerance.is_finite()) {
            return Err(ConfigError::Validation("tolerance must be positive".into()));
        }
        if !(self.step_scale > 0.0 && self.step_scale.is_finite()) {
            return Err(ConfigError::Validation(
                "step_scale must be positive".into(),
            ));
        }
        if catalog::example(&self.example, DiffEngine::analytic()).is_err() {
            return Err(ConfigError::UnknownExample(self.example.clone()));
        }
        let applicable = applicable_checks(&self.example);
        for c in &self.checks {
            if !CHECKS.contains(&c.as_str()) {
                return Err(ConfigError::UnknownCheck(c.clone()));
            }
            if !applicable.contains(&c.as_str()) {
                return Err(ConfigError::Validation(format!(
                    "check `{c}` does not apply to example `{}`",
                    self.example
                )));
            }
        }
        Ok(())
    }
}

/// Parses and validates a JSON config, applying defaults.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let value: serde_json::Value = serde_json::from_str(text).map_err(|e| ConfigError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let obj = value
        .as_object()
        .ok_or_else(|| ConfigError::Validation("config must be a JSON object".into()))?;
    if let Some(k) = obj.keys().find(|k| !KEYS.contains(&k.as_str())) {
        return Err(ConfigError::UnknownKey(k.clone()));
    }
    if obj.get("samples").and_then(|v| v.as_u64()) == Some(0) {
        return Err(ConfigError::Validation("samples must be at least 1".into()));
    }
    if !obj.contains_key("example") {
        return Err(ConfigError::Validation("missing key `example`".into()));
    }
    let config: RunConfig =
        serde_json::from_value(value).map_err(|e| ConfigError::Validation(e.to_string()))?;
    config.validate()?;
    Ok(config)
}
