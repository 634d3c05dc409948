//! `key=value` parameter files and overrides.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::str::FromStr;

use cnpmi_core::PlmConfig;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("line {line}: expected key=value, got {text:?}")]
    Syntax { line: usize, text: String },
    #[error("unknown parameter {key:?} (known: {known})")]
    UnknownKey { key: String, known: String },
    #[error("parameter {key}: cannot parse {value:?}: {message}")]
    Value {
        key: String,
        value: String,
        message: String,
    },
    #[error("parameter {key}: {message}")]
    Invalid { key: String, message: String },
}

/// Raw string parameters. Later assignments override earlier ones.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Params {
    values: BTreeMap<String, String>,
}

fn assignment(text: &str) -> Option<(String, String)> {
    let (k, v) = text.split_once('=')?;
    let k = k.trim();
    if k.is_empty() {
        return None;
    }
    Some((k.to_string(), v.trim().to_string()))
}

impl Params {
    pub fn new() -> Self {
        Self::default()
    }

    /// Parses a config file; blank lines and `#` comments are skipped.
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut p = Params::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = assignment(line).ok_or_else(|| ConfigError::Syntax {
                line: n + 1,
                text: line.to_string(),
            })?;
            p.values.insert(k, v);
        }
        Ok(p)
    }

    /// Applies one `key=value` override.
    pub fn set(&mut self, text: &str) -> Result<(), ConfigError> {
        let (k, v) = assignment(text).ok_or_else(|| ConfigError::Syntax {
            line: 0,
            text: text.to_string(),
        })?;
        self.values.insert(k, v);
        Ok(())
    }

    pub fn insert(&mut self, key: &str, value: impl Display) {
        self.values.insert(key.to_string(), value.to_string());
    }

    pub fn contains(&self, key: &str) -> bool {
        self.values.contains_key(key)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.values.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }

    /// Fails on the first key not listed in `known`.
    pub fn check_known(&self, known: &[&str]) -> Result<(), ConfigError> {
        match self.values.keys().find(|k| !known.contains(&k.as_str())) {
            Some(key) => Err(ConfigError::UnknownKey {
                key: key.clone(),
                known: known.join(", "),
            }),
            None => Ok(()),
        }
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>, ConfigError>
    where
        T::Err: Display,
    {
        self.values
            .get(key)
            .map(|v| {
                v.parse().map_err(|e: T::Err| ConfigError::Value {
                    key: key.to_string(),
                    value: v.clone(),
                    message: e.to_string(),
                })
            })
            .transpose()
    }

    pub fn get_or<T: FromStr>(&self, key: &str, default: T) -> Result<T, ConfigError>
    where
        T::Err: Display,
    {
        Ok(self.get(key)?.unwrap_or(default))
    }

    /// A comma-separated list.
    pub fn list<T: FromStr>(&self, key: &str) -> Result<Option<Vec<T>>, ConfigError>
    where
        T::Err: Display,
    {
        let Some(raw) = self.values.get(key) else {
            return Ok(None);
        };
        raw.split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| {
                s.parse().map_err(|e: T::Err| ConfigError::Value {
                    key: key.to_string(),
                    value: s.to_string(),
                    message: e.to_string(),
                })
            })
            .collect::<Result<Vec<T>, _>>()
            .map(Some)
    }
}

pub const PLM_KEYS: [&str; 9] = [
    "topics",
    "alpha",
    "beta",
    "iterations",
    "chains",
    "optimize_interval",
    "link_fraction",
    "sample_sweeps",
    "max_cells",
];

/// Topic model settings from `params`, defaults elsewhere.
pub fn plm_config(params: &Params, seed: u64) -> Result<PlmConfig, ConfigError> {
    let d = PlmConfig::default();
    let config = PlmConfig {
        num_topics: params.get_or("topics", d.num_topics)?,
        alpha: params.get_or("alpha", d.alpha)?,
        beta: params.get_or("beta", d.beta)?,
        iterations: params.get_or("iterations", d.iterations)?,
        chains: params.get_or("chains", d.chains)?,
        optimize_interval: params.get_or("optimize_interval", d.optimize_interval)?,
        link_fraction: params.get_or("link_fraction", d.link_fraction)?,
        seed,
        sample_sweeps: params.get_or("sample_sweeps", d.sample_sweeps)?,
        max_cells: params.get_or("max_cells", d.max_cells)?,
    };
    config.validate().map_err(|e| ConfigError::Invalid {
        key: "plm".into(),
        message: e.to_string(),
    })?;
    Ok(config)
}

/// Effective settings of a topic model run, as report key/value pairs.
pub fn plm_settings(c: &PlmConfig) -> Vec<(String, String)> {
    [
        ("topics", c.num_topics.to_string()),
        ("alpha", format!("{:?}", c.alpha)),
        ("beta", format!("{:?}", c.beta)),
        ("iterations", c.iterations.to_string()),
        ("chains", c.chains.to_string()),
        ("optimize_interval", c.optimize_interval.to_string()),
        ("link_fraction", format!("{:?}", c.link_fraction)),
        ("sample_sweeps", c.sample_sweeps.to_string()),
        ("max_cells", c.max_cells.to_string()),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_string(), v))
    .collect()
}
