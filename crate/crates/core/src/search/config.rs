use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::knowledge::RecordSettings;

/// Search parameters. The feature flags select the ablations of the
/// evaluation; all of them on is the full strategy.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SearchConfig {
    pub c_policy: f64,
    pub c_exploration: f64,
    /// Number of nearest goal lists consulted by the prior evaluation.
    pub eval_radius: usize,
    #[serde(with = "secs")]
    pub tactic_timeout: Duration,
    #[serde(with = "secs")]
    pub auto_timeout: Duration,
    pub auto_premises: usize,
    #[serde(with = "secs")]
    pub global_timeout: Duration,
    pub preselect_n: usize,
    pub ortho_radius: usize,
    pub abs_radius: usize,
    /// Off: candidate tactics in corpus order, uniform prior policy, and
    /// the most recent theorems as `Auto` premises.
    pub learned_policy: bool,
    pub orthogonalization: bool,
    pub abstraction: bool,
    pub evaluation: bool,
    /// `Auto` with predicted premises is tried first on every open goal.
    pub auto_priority: bool,
    /// Retry a found proof's conjecture with a low `c_policy` and keep the
    /// shorter proof.
    pub research_minimization: bool,
    /// Step budget on top of the wall-clock one; exhausting it counts as a
    /// timeout.
    pub max_steps: Option<usize>,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            c_policy: 0.5,
            c_exploration: 2.0,
            eval_radius: 10,
            tactic_timeout: Duration::from_millis(50),
            auto_timeout: Duration::from_millis(100),
            auto_premises: 32,
            global_timeout: Duration::from_secs(60),
            preselect_n: 500,
            ortho_radius: 20,
            abs_radius: 16,
            learned_policy: true,
            orthogonalization: true,
            abstraction: true,
            evaluation: true,
            auto_priority: true,
            research_minimization: false,
            max_steps: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("unknown configuration key `{0}`")]
    UnknownKey(String),
    #[error("invalid value `{value}` for `{key}`: {reason}")]
    InvalidValue { key: String, value: String, reason: String },
    #[error("line {line}: expected `key=value`")]
    Malformed { line: usize },
}

fn invalid(key: &str, value: &str, reason: impl Into<String>) -> ConfigError {
    ConfigError::InvalidValue {
        key: key.to_string(),
        value: value.to_string(),
        reason: reason.into(),
    }
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, ConfigError> {
    value.parse().map_err(|_| invalid(key, value, "not a number"))
}

fn parse_bool(key: &str, value: &str) -> Result<bool, ConfigError> {
    match value {
        "true" | "on" | "1" => Ok(true),
        "false" | "off" | "0" => Ok(false),
        _ => Err(invalid(key, value, "expected true or false")),
    }
}

fn parse_secs(key: &str, value: &str) -> Result<Duration, ConfigError> {
    let s: f64 = parse_num(key, value)?;
    if !s.is_finite() || s < 0.0 {
        return Err(invalid(key, value, "expected a non-negative number of seconds"));
    }
    Ok(Duration::from_secs_f64(s))
}

impl SearchConfig {
    /// Uniform priors, no abstraction, no evaluation. Orthogonalization and
    /// the Auto candidate stay on.
    pub fn baseline() -> SearchConfig {
        SearchConfig {
            learned_policy: false,
            abstraction: false,
            evaluation: false,
            ..SearchConfig::default()
        }
    }

    /// Knowledge-building settings matching this configuration.
    pub fn record_settings(&self) -> RecordSettings {
        RecordSettings {
            orthogonalization: self.orthogonalization,
            abstraction: self.abstraction,
            ortho_radius: self.ortho_radius,
            abs_radius: self.abs_radius,
            tactic_timeout: self.tactic_timeout,
            ..RecordSettings::default()
        }
    }

    /// Sets one field from its textual form. Durations are in seconds.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let value = value.trim();
        match key.trim() {
            "c_policy" => self.c_policy = parse_num(key, value)?,
            "c_exploration" => self.c_exploration = parse_num(key, value)?,
            "eval_radius" => self.eval_radius = parse_num(key, value)?,
            "tactic_timeout" => self.tactic_timeout = parse_secs(key, value)?,
            "auto_timeout" => self.auto_timeout = parse_secs(key, value)?,
            "auto_premises" => self.auto_premises = parse_num(key, value)?,
            "global_timeout" => self.global_timeout = parse_secs(key, value)?,
            "preselect_n" => self.preselect_n = parse_num(key, value)?,
            "ortho_radius" => self.ortho_radius = parse_num(key, value)?,
            "abs_radius" => self.abs_radius = parse_num(key, value)?,
            "learned_policy" => self.learned_policy = parse_bool(key, value)?,
            "orthogonalization" => self.orthogonalization = parse_bool(key, value)?,
            "abstraction" => self.abstraction = parse_bool(key, value)?,
            "evaluation" => self.evaluation = parse_bool(key, value)?,
            "auto_priority" => self.auto_priority = parse_bool(key, value)?,
            "research_minimization" => self.research_minimization = parse_bool(key, value)?,
            "max_steps" => {
                self.max_steps = match value {
                    "none" => None,
                    v => Some(parse_num(key, v)?),
                }
            }
            other => return Err(ConfigError::UnknownKey(other.to_string())),
        }
        Ok(())
    }

    /// Applies a flat `key=value` file; blank lines and `#` comments are
    /// skipped. The result is validated.
    pub fn apply_text(&mut self, text: &str) -> Result<(), ConfigError> {
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or(ConfigError::Malformed { line: i + 1 })?;
            self.set(k, v)?;
        }
        self.validate()
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let c = self.c_policy;
        if !(c > 0.0 && c < 1.0) {
            return Err(invalid("c_policy", &c.to_string(), "must lie strictly between 0 and 1"));
        }
        if !(self.c_exploration > 0.0 && self.c_exploration.is_finite()) {
            return Err(invalid("c_exploration", &self.c_exploration.to_string(), "must be positive"));
        }
        for (key, v) in [
            ("eval_radius", self.eval_radius),
            ("auto_premises", self.auto_premises),
            ("preselect_n", self.preselect_n),
            ("ortho_radius", self.ortho_radius),
            ("abs_radius", self.abs_radius),
        ] {
            if v == 0 {
                return Err(invalid(key, "0", "must be positive"));
            }
        }
        for (key, d) in [("tactic_timeout", self.tactic_timeout), ("auto_timeout", self.auto_timeout)] {
            if d.is_zero() {
                return Err(invalid(key, "0", "must be positive"));
            }
        }
        Ok(())
    }
}

/// Durations as fractional seconds.
mod secs {
    use serde::{Deserialize, Deserializer, Serializer};
    use std::time::Duration;

    pub fn serialize<S: Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_f64(d.as_secs_f64())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Duration, D::Error> {
        let v = f64::deserialize(d)?;
        if !v.is_finite() || v < 0.0 {
            return Err(serde::de::Error::custom("duration must be a non-negative number of seconds"));
        }
        Ok(Duration::from_secs_f64(v))
    }
}
