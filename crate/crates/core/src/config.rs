// SPDX-License-Identifier: Apache-2.0

//! Experiment configuration, loaded from TOML.

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::selection::{PriorityPolicy, Strategy};
use crate::time::SimTime;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("invalid `{field}`: {reason}")]
    Invalid { field: String, reason: String },
    #[error("cannot parse config: {0}")]
    Parse(String),
    #[error("cannot read config {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

fn invalid(field: &str, reason: impl Into<String>) -> ConfigError {
    ConfigError::Invalid { field: field.to_owned(), reason: reason.into() }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AgingConfig {
    pub enabled: bool,
    pub threshold_seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    /// Mean arrivals per simulated second.
    pub lambda: f64,
    /// Probability that an arrival carries the priority flag.
    pub rho: f64,
    pub horizon_seconds: f64,
    pub visibility_delay_seconds: f64,
    /// Cumulative weight at which a transaction counts as confirmed.
    pub theta: u64,
    pub strategy: Strategy,
    pub aging: AgingConfig,
    pub seed: u64,
    /// Transaction ids (arrival ordinals, starting at 1) flagged priority
    /// regardless of `rho`.
    #[serde(default)]
    pub pinned_priority: Vec<u64>,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            lambda: 10.0,
            rho: 0.05,
            horizon_seconds: 300.0,
            visibility_delay_seconds: 1.0,
            theta: 8,
            strategy: Strategy::Ptsa,
            aging: AgingConfig { enabled: true, threshold_seconds: 30.0 },
            seed: 1,
            pinned_priority: Vec::new(),
        }
    }
}

/// The reference configuration as written by `gen-config`.
pub const REFERENCE_CONFIG_TOML: &str = r#"# tangle-sim experiment configuration.
# Every key is required except `pinned_priority`.

# Mean transaction arrival rate, transactions per simulated second (> 0).
lambda = 10.0

# Probability that an arriving transaction is flagged high priority, in [0, 1].
rho = 0.05

# Arrivals are generated on [0, horizon_seconds) (> 0).
horizon_seconds = 300.0

# A transaction becomes selectable once it is this many seconds old (>= 0).
visibility_delay_seconds = 1.0

# Confirmation threshold: a transaction is confirmed once its cumulative
# weight is >= theta (integer >= 1).
theta = 8

# Tip selection strategy: "uniform" or "ptsa".
strategy = "ptsa"

# Base seed. Arrivals and attachment choices use independent streams.
seed = 1

# Arrival ordinals (first arrival is 1) forced to high priority.
pinned_priority = []

[aging]
# Unconfirmed transactions at least `threshold_seconds` old count as high
# priority during selection (threshold > 0 when enabled).
enabled = true
threshold_seconds = 30.0
"#;

impl SimConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, ConfigError> {
        let config: SimConfig = toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| ConfigError::Io { path: path.display().to_string(), source })?;
        Self::from_toml_str(&text)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(self.lambda.is_finite() && self.lambda > 0.0) {
            return Err(invalid("lambda", format!("must be a positive finite rate, got {}", self.lambda)));
        }
        if !(0.0..=1.0).contains(&self.rho) {
            return Err(invalid("rho", format!("must lie in [0, 1], got {}", self.rho)));
        }
        if !(self.horizon_seconds.is_finite() && self.horizon_seconds > 0.0) {
            return Err(invalid("horizon_seconds", format!("must be positive, got {}", self.horizon_seconds)));
        }
        if !(self.visibility_delay_seconds.is_finite() && self.visibility_delay_seconds >= 0.0) {
            return Err(invalid(
                "visibility_delay_seconds",
                format!("must be non-negative, got {}", self.visibility_delay_seconds),
            ));
        }
        if self.theta == 0 {
            return Err(invalid("theta", "must be at least 1"));
        }
        let a = self.aging.threshold_seconds;
        if !a.is_finite() || a < 0.0 || (self.aging.enabled && a <= 0.0) {
            return Err(invalid("aging.threshold_seconds", format!("must be positive when aging is enabled, got {a}")));
        }
        if let Some(bad) = self.pinned_priority.iter().find(|&&id| id == 0) {
            return Err(invalid("pinned_priority", format!("ids start at 1 (genesis is 0), got {bad}")));
        }
        Ok(())
    }

    pub fn horizon(&self) -> SimTime {
        SimTime::from_secs_f64(self.horizon_seconds)
    }

    pub fn visibility_delay(&self) -> SimTime {
        SimTime::from_secs_f64(self.visibility_delay_seconds)
    }

    pub fn policy(&self) -> PriorityPolicy {
        if self.aging.enabled {
            PriorityPolicy::aging_after(SimTime::from_secs_f64(self.aging.threshold_seconds))
        } else {
            PriorityPolicy::disabled()
        }
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        SimConfig { seed, ..self.clone() }
    }

    pub fn with_strategy(&self, strategy: Strategy) -> Self {
        SimConfig { strategy, ..self.clone() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn field_of(err: ConfigError) -> String {
        match err {
            ConfigError::Invalid { field, .. } => field,
            other => panic!("expected Invalid, got {other}"),
        }
    }

    #[test]
    fn reference_template_is_the_default() {
        let parsed = SimConfig::from_toml_str(REFERENCE_CONFIG_TOML).unwrap();
        assert_eq!(parsed, SimConfig::default());
        assert_eq!(parsed.theta, 8);
    }

    #[test]
    fn bound_violations_name_the_field() {
        let cases: [(&str, &str, &str); 6] = [
            ("rho = 0.05", "rho = 1.5", "rho"),
            ("lambda = 10.0", "lambda = 0.0", "lambda"),
            ("theta = 8", "theta = 0", "theta"),
            ("horizon_seconds = 300.0", "horizon_seconds = -1.0", "horizon_seconds"),
            ("visibility_delay_seconds = 1.0", "visibility_delay_seconds = -0.5", "visibility_delay_seconds"),
            ("threshold_seconds = 30.0", "threshold_seconds = 0.0", "aging.threshold_seconds"),
        ];
        for (from, to, field) in cases {
            let text = REFERENCE_CONFIG_TOML.replace(from, to);
            assert_eq!(field_of(SimConfig::from_toml_str(&text).unwrap_err()), field);
        }
    }

    #[test]
    fn disabled_aging_accepts_zero_threshold() {
        let text = REFERENCE_CONFIG_TOML
            .replace("enabled = true", "enabled = false")
            .replace("threshold_seconds = 30.0", "threshold_seconds = 0.0");
        let config = SimConfig::from_toml_str(&text).unwrap();
        assert_eq!(config.policy(), PriorityPolicy::disabled());
    }

    #[test]
    fn unknown_and_missing_keys() {
        let err = SimConfig::from_toml_str(&format!("{REFERENCE_CONFIG_TOML}\nbogus = 1\n")).unwrap_err();
        assert!(err.to_string().contains("bogus"), "{err}");
        let err = SimConfig::from_toml_str(&REFERENCE_CONFIG_TOML.replace("rho = 0.05", "")).unwrap_err();
        assert!(err.to_string().contains("rho"), "{err}");
        let err = SimConfig::from_toml_str(&REFERENCE_CONFIG_TOML.replace("\"ptsa\"", "\"mcmc\"")).unwrap_err();
        assert!(matches!(err, ConfigError::Parse(_)));
    }

    #[test]
    fn pinned_ids_exclude_genesis() {
        let text = REFERENCE_CONFIG_TOML.replace("pinned_priority = []", "pinned_priority = [0, 3]");
        assert_eq!(field_of(SimConfig::from_toml_str(&text).unwrap_err()), "pinned_priority");
    }
}
