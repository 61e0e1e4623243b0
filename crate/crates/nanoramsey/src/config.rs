//! Flat TOML run configuration.
//!
//! ```toml
//! b_gradient = 1e7      # T/m
//! theta = 0.0           # rad
//! t3 = 1e-4             # s
//! seed = 42             # only for sampling commands
//! ```
//!
//! Every key except `seed` must be listed in
//! [`CONFIG_KEYS`](nanoramsey_core::params::CONFIG_KEYS); anything else is rejected.

use std::path::Path;

use nanoramsey_core::params::{build_params, check_known_keys, ConfigMap};
use nanoramsey_core::{ExperimentParams, PulseSequence};
use sha2::{Digest, Sha256};

use crate::error::{AppError, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub values: ConfigMap,
    pub seed: Option<u64>,
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let table: toml::Table = text.parse()?;
        let mut values = ConfigMap::new();
        let mut seed = None;
        for (key, value) in table {
            if key == "seed" {
                seed = Some(match value {
                    toml::Value::Integer(i) if i >= 0 => i as u64,
                    _ => return Err(AppError::Seed),
                });
                continue;
            }
            let v = match value {
                toml::Value::Float(f) => f,
                toml::Value::Integer(i) => i as f64,
                toml::Value::Table(_) => return Err(AppError::Nested { key }),
                _ => return Err(AppError::NotNumeric(key)),
            };
            values.insert(key, v);
        }
        check_known_keys(&values)?;
        Ok(Self { values, seed })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| AppError::Read { path: path.to_owned(), source })?;
        Self::from_toml_str(&text)
    }

    pub fn params(&self) -> Result<ExperimentParams> {
        Ok(build_params(&self.values)?)
    }

    pub fn sequence(&self, params: &ExperimentParams) -> Result<PulseSequence> {
        Ok(PulseSequence::from_config(&self.values, params.t3)?)
    }

    /// Copy with one key replaced; the key must be part of the schema.
    pub fn with_value(&self, key: &str, value: f64) -> Result<Self> {
        let mut out = self.clone();
        out.values.insert(key.to_owned(), value);
        check_known_keys(&out.values)?;
        Ok(out)
    }

    /// SHA-256 over the sorted `key = value` lines (shortest round-trip floats).
    pub fn hash(&self) -> String {
        let mut h = Sha256::new();
        for (k, v) in &self.values {
            h.update(format!("{k} = {v:e}\n").as_bytes());
        }
        if let Some(s) = self.seed {
            h.update(format!("seed = {s}\n").as_bytes());
        }
        hex::encode(h.finalize())
    }

    /// Command-line seed if given, else the config's.
    pub fn seed_with(&self, cli: Option<u64>) -> Option<u64> {
        cli.or(self.seed)
    }
}
