//! Flat `key = value` run configuration files.
//!
//! Blank lines and `#` comments are ignored. Every key must be one the CLI
//! knows; values are parsed when a command asks for them, and command-line
//! flags always win over file values.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use crate::BenchError;

pub const KNOWN_KEYS: &[&str] = &[
    "checkpoints",
    "f",
    "fraction",
    "grid",
    "kelly",
    "lambda",
    "n",
    "out",
    "p",
    "paths",
    "root_tol",
    "scale",
    "seed",
    "stake",
    "steps",
    "threads",
    "w0",
];

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ConfigFile {
    values: BTreeMap<String, String>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, BenchError> {
        let text = fs::read_to_string(path).map_err(|e| {
            BenchError::Usage(format!("cannot read config {}: {e}", path.display()))
        })?;
        text.parse()
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    /// `cli` if given, else the parsed file value, else `None`.
    pub fn resolve<T: FromStr>(&self, cli: Option<T>, key: &str) -> Result<Option<T>, BenchError> {
        if cli.is_some() {
            return Ok(cli);
        }
        self.raw(key)
            .map(|v| {
                v.parse().map_err(|_| {
                    BenchError::Usage(format!("config key `{key}`: cannot parse `{v}`"))
                })
            })
            .transpose()
    }
}

impl FromStr for ConfigFile {
    type Err = BenchError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let mut values = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let lineno = i + 1;
            let (key, value) = line.split_once('=').ok_or_else(|| {
                BenchError::Usage(format!("config line {lineno}: expected `key = value`"))
            })?;
            let (key, value) = (key.trim(), value.trim());
            if !KNOWN_KEYS.contains(&key) {
                return Err(BenchError::Usage(format!(
                    "config line {lineno}: unknown key `{key}`"
                )));
            }
            if values.insert(key.to_owned(), value.to_owned()).is_some() {
                return Err(BenchError::Usage(format!(
                    "config line {lineno}: duplicate key `{key}`"
                )));
            }
        }
        Ok(Self { values })
    }
}
