//! Flat `key = value` experiment configs.
//!
//! ```text
//! # comment
//! experiment = fixed-points
//! system = rot:k=4,s=1
//! backend = rational
//! seed = 7
//! output_dir = out
//! ```
//!
//! Keys other than the five above are experiment parameters.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Rational,
    Float,
}

impl FromStr for Backend {
    type Err = LabError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rational" => Ok(Backend::Rational),
            "float" => Ok(Backend::Float),
            other => Err(LabError::InvalidConfig(format!(
                "backend must be `rational` or `float`, got {other:?}"
            ))),
        }
    }
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Backend::Rational => "rational",
            Backend::Float => "float",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExperimentConfig {
    pub experiment: String,
    pub system: Option<String>,
    pub backend: Backend,
    pub seed: Option<u64>,
    pub output_dir: PathBuf,
    pub params: BTreeMap<String, String>,
}

pub const DEFAULT_OUTPUT_DIR: &str = "lens-lab-output";

/// Splits `key=value`, trimming both sides.
pub fn parse_assignment(line: &str) -> Result<(String, String)> {
    let (k, v) = line
        .split_once('=')
        .ok_or_else(|| LabError::InvalidConfig(format!("expected key = value, got {line:?}")))?;
    let k = k.trim();
    if k.is_empty() {
        return Err(LabError::InvalidConfig(format!("empty key in {line:?}")));
    }
    Ok((k.to_string(), v.trim().to_string()))
}

/// Raw key/value pairs, later keys overriding earlier ones.
pub fn parse_pairs(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (no, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with(';') {
            continue;
        }
        if line.starts_with('[') {
            return Err(LabError::InvalidConfig(format!(
                "line {}: sections are not supported, the config is a flat key = value list",
                no + 1
            )));
        }
        let (k, v) = parse_assignment(line).map_err(|e| LabError::InvalidConfig(format!("line {}: {e}", no + 1)))?;
        out.insert(k, v);
    }
    Ok(out)
}

impl ExperimentConfig {
    pub fn from_pairs(mut pairs: BTreeMap<String, String>) -> Result<Self> {
        let experiment = pairs
            .remove("experiment")
            .ok_or_else(|| LabError::InvalidConfig("missing `experiment`".into()))?;
        let system = pairs.remove("system").filter(|s| !s.is_empty());
        let backend = match pairs.remove("backend") {
            Some(b) => b.parse()?,
            None => Backend::Rational,
        };
        let seed = pairs
            .remove("seed")
            .filter(|s| !s.is_empty())
            .map(|s| {
                s.parse::<u64>()
                    .map_err(|_| LabError::InvalidConfig(format!("seed must be an unsigned 64-bit integer, got {s:?}")))
            })
            .transpose()?;
        let output_dir = pairs
            .remove("output_dir")
            .map(PathBuf::from)
            .unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT_DIR));
        Ok(Self {
            experiment,
            system,
            backend,
            seed,
            output_dir,
            params: pairs,
        })
    }

    /// Reads `path` and applies `overrides` (each `key=value`) on top.
    pub fn load(path: &Path, overrides: &[String]) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| LabError::io(path, e))?;
        let mut pairs = parse_pairs(&text)?;
        for o in overrides {
            let (k, v) = parse_assignment(o)?;
            pairs.insert(k, v);
        }
        Self::from_pairs(pairs)
    }

    /// Echo of every setting, sorted by key.
    pub fn echo(&self) -> BTreeMap<String, String> {
        let mut out = self.params.clone();
        out.insert("experiment".into(), self.experiment.clone());
        out.insert("backend".into(), self.backend.to_string());
        if let Some(s) = &self.system {
            out.insert("system".into(), s.clone());
        }
        if let Some(s) = self.seed {
            out.insert("seed".into(), s.to_string());
        }
        out
    }

    pub fn param(&self, key: &str) -> Option<&str> {
        self.params.get(key).map(String::as_str)
    }

    pub fn parse_param<T: FromStr>(&self, key: &str, default: T) -> Result<T> {
        match self.param(key) {
            None => Ok(default),
            Some(raw) => raw
                .parse()
                .map_err(|_| LabError::InvalidConfig(format!("cannot parse {key} = {raw:?}"))),
        }
    }

    pub fn require_seed(&self) -> Result<u64> {
        self.seed
            .ok_or_else(|| LabError::InvalidConfig(format!("{} uses randomness and needs `seed`", self.experiment)))
    }

    /// Independent generator for sub-task `stream`.
    pub fn rng(&self, stream: u64) -> Result<ChaCha8Rng> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.require_seed()?);
        rng.set_stream(stream);
        Ok(rng)
    }
}

/// Comma-separated list.
pub fn parse_list<T: FromStr>(key: &str, raw: &str) -> Result<Vec<T>> {
    raw.split(',')
        .map(|x| {
            x.trim()
                .parse()
                .map_err(|_| LabError::InvalidConfig(format!("{key}: cannot parse {x:?}")))
        })
        .collect()
}
