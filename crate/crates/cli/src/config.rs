//! `key = value` configuration files.
//!
//! One setting per line, `#` starts a comment, values may be quoted. Keys are
//! the long flag names (`out-prefix` and `out_prefix` are the same key).
//! Flags given on the command line take precedence.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use crate::Failure;

#[derive(Debug, Default, Clone)]
pub struct ConfigFile {
    values: BTreeMap<String, String>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, Failure> {
        let text = fs::read_to_string(path)
            .map_err(|e| Failure::io(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, Failure> {
        let mut values = BTreeMap::new();
        for (k, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Failure::invalid(format!(
                    "config line {}: expected key = value",
                    k + 1
                )));
            };
            let key = key.trim().replace('_', "-");
            let value = value.trim().trim_matches('"').to_string();
            if values.insert(key.clone(), value).is_some() {
                return Err(Failure::invalid(format!(
                    "config line {}: duplicate key '{key}'",
                    k + 1
                )));
            }
        }
        Ok(Self { values })
    }

    /// Rejects keys that the running command does not understand.
    pub fn check_keys(&self, allowed: &[&str]) -> Result<(), Failure> {
        match self.values.keys().find(|k| !allowed.contains(&k.as_str())) {
            Some(k) => Err(Failure::invalid(format!(
                "unknown config key '{k}' for this command"
            ))),
            None => Ok(()),
        }
    }

    /// The flag value if given, else the parsed config value.
    pub fn pick<T: FromStr>(&self, flag: Option<T>, key: &str) -> Result<Option<T>, Failure>
    where
        T::Err: std::fmt::Display,
    {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.values.get(key) {
            None => Ok(None),
            Some(v) => v.parse().map(Some).map_err(|e| {
                Failure::invalid(format!("config key '{key}': invalid value '{v}': {e}"))
            }),
        }
    }

    /// A switch is on if the flag is set or the config says `true`.
    pub fn switch(&self, flag: bool, key: &str) -> Result<bool, Failure> {
        Ok(flag || self.pick::<bool>(None, key)?.unwrap_or(false))
    }
}
