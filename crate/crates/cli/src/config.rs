//! Flat `key = value` configuration files.
//!
//! Blank lines and lines starting with `#` are ignored. Keys are long flag
//! names without the leading dashes, e.g. `n-qubits = 10`. A value given on the
//! command line wins over the file; the file wins over environment defaults.

use std::collections::HashMap;
use std::path::Path;
use std::str::FromStr;

use crate::error::CliError;

pub const KNOWN_KEYS: &[&str] = &[
    "n-qubits",
    "count",
    "shuffle",
    "max-qubits",
    "source",
    "seed-file",
    "key",
    "counter",
    "pool",
    "workers",
];

#[derive(Debug, Default, Clone)]
pub struct ConfigFile {
    values: HashMap<String, String>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::io(format!("reading config {}", path.display()), e))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut values = HashMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("config line {}: expected key = value", i + 1)))?;
            let k = k.trim();
            if !KNOWN_KEYS.contains(&k) {
                return Err(CliError::Usage(format!("config line {}: unknown key {k:?}", i + 1)));
            }
            values.insert(k.to_string(), v.trim().to_string());
        }
        Ok(ConfigFile { values })
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>, CliError> {
        match self.values.get(key) {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|_| CliError::Usage(format!("config: invalid value {v:?} for {key}"))),
        }
    }
}

/// First of: command-line value, config file value, fallback.
pub fn resolve<T: FromStr>(
    flag: Option<T>,
    cfg: &ConfigFile,
    key: &str,
    fallback: impl FnOnce() -> Result<T, CliError>,
) -> Result<T, CliError> {
    if let Some(v) = flag {
        return Ok(v);
    }
    if let Some(v) = cfg.get(key)? {
        return Ok(v);
    }
    fallback()
}
