//! Flat `key = value` run configuration. Command-line flags override file
//! values; unknown keys are rejected by name.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use crate::{Error, Result};

pub const KEYS: &[&str] = &[
    "cutoff",
    "units",
    "output",
    "dataset",
    "lambda0_mev",
    "lambda0_thz",
    "dir",
    "bmax",
    "steps",
    "grid",
    "extent",
    "doublets",
    "broadening_mev",
    "resolution_mev",
    "hbar_omega_mev",
    "refractive_index",
    "photon_ev",
    "dipole_debye",
    "tau_ns",
    "temperature_k",
];

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunConfig {
    values: BTreeMap<String, String>,
}

fn check_key(key: &str) -> Result<()> {
    if KEYS.contains(&key) {
        Ok(())
    } else {
        Err(Error::Config(format!("unknown configuration key '{key}'")))
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (no, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value, got '{line}'", no + 1)))?;
            cfg.set(k.trim(), v.trim())?;
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        check_key(key)?;
        self.values.insert(key.to_string(), value.to_string());
        Ok(())
    }

    /// Set `key` only when a flag value is present.
    pub fn override_with<T: ToString>(&mut self, key: &str, flag: Option<T>) -> Result<()> {
        match flag {
            Some(v) => self.set(key, &v.to_string()),
            None => Ok(()),
        }
    }

    pub fn get_str(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        check_key(key)?;
        match self.values.get(key) {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|_| Error::Config(format!("invalid value '{v}' for '{key}'"))),
        }
    }

    pub fn get_or<T: FromStr>(&self, key: &str, default: T) -> Result<T> {
        Ok(self.get(key)?.unwrap_or(default))
    }

    pub fn entries(&self) -> impl Iterator<Item = (&str, &str)> {
        self.values.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_types() {
        let c = RunConfig::parse("# comment\ncutoff = 12\n\nunits=GHz\nbmax = 7.5\n").unwrap();
        assert_eq!(c.get::<usize>("cutoff").unwrap(), Some(12));
        assert_eq!(c.get::<f64>("bmax").unwrap(), Some(7.5));
        assert_eq!(c.get_str("units"), Some("GHz"));
        assert_eq!(c.get_or("steps", 140usize).unwrap(), 140);
    }

    #[test]
    fn unknown_key_named() {
        let e = RunConfig::parse("cutof = 3\n").unwrap_err();
        assert!(e.to_string().contains("'cutof'"));
    }

    #[test]
    fn bad_values() {
        let c = RunConfig::parse("cutoff = ten\n").unwrap();
        assert!(c.get::<usize>("cutoff").is_err());
        assert!(RunConfig::parse("just words\n").is_err());
    }

    #[test]
    fn flags_override() {
        let mut c = RunConfig::parse("cutoff = 12\n").unwrap();
        c.override_with("cutoff", Some(14)).unwrap();
        c.override_with::<usize>("steps", None).unwrap();
        assert_eq!(c.get::<usize>("cutoff").unwrap(), Some(14));
        assert_eq!(c.get::<usize>("steps").unwrap(), None);
    }

    #[test]
    fn decimal_point_only() {
        let c = RunConfig::parse("bmax = 7,5\n").unwrap();
        assert!(c.get::<f64>("bmax").is_err());
    }
}
