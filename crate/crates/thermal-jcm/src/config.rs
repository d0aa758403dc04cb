//! `key=value` config files merged with command-line flags.

use std::cell::RefCell;
use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde_json::{Map, Value};

use crate::CliError;

/// Parses `key=value` lines. `#` starts a comment; blank lines are skipped.
pub fn parse_key_values(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut out = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("config line {}: expected key=value, got {raw:?}", lineno + 1)))?;
        let key = k.trim().replace('-', "_");
        if key.is_empty() {
            return Err(CliError::Usage(format!("config line {}: empty key", lineno + 1)));
        }
        if out.insert(key.clone(), v.trim().to_string()).is_some() {
            return Err(CliError::Usage(format!("config line {}: duplicate key {key}", lineno + 1)));
        }
    }
    Ok(out)
}

/// Resolved settings for one run: file values overridden by flags, with the
/// defaults actually used recorded for the sidecar.
#[derive(Debug)]
pub struct Settings {
    values: BTreeMap<String, String>,
    used: RefCell<BTreeMap<String, Value>>,
}

const THERMAL_KEYS: [&str; 2] = ["beta", "theta"];

impl Settings {
    /// `flags` lists every key the subcommand understands, with the value
    /// given on the command line if any.
    pub fn resolve(config: Option<&Path>, flags: &[(&'static str, Option<String>)]) -> Result<Self, CliError> {
        let mut values = match config {
            Some(path) => {
                let text = fs::read_to_string(path)
                    .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
                parse_key_values(&text)?
            }
            None => BTreeMap::new(),
        };
        for key in values.keys() {
            if !flags.iter().any(|(k, _)| k == key) {
                return Err(CliError::Usage(format!("unknown config key {key:?} for this subcommand")));
            }
        }
        let thermal_in = |m: &BTreeMap<String, String>| THERMAL_KEYS.iter().filter(|k| m.contains_key(**k)).count();
        if thermal_in(&values) > 1 {
            return Err(CliError::Usage("inconsistent thermal spec: config sets both beta and theta".into()));
        }
        let flag_thermal = flags.iter().any(|(k, v)| THERMAL_KEYS.contains(k) && v.is_some());
        if flag_thermal {
            // a thermal flag replaces whichever thermal key the file had
            for k in THERMAL_KEYS {
                values.remove(k);
            }
        }
        for (k, v) in flags {
            if let Some(v) = v {
                values.insert((*k).to_string(), v.clone());
            }
        }
        if thermal_in(&values) > 1 {
            return Err(CliError::Usage("inconsistent thermal spec: give either beta or theta".into()));
        }
        Ok(Settings { values, used: RefCell::new(BTreeMap::new()) })
    }

    fn parse<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>, CliError> {
        match self.values.get(key) {
            None => Ok(None),
            Some(s) => s
                .parse::<T>()
                .map(Some)
                .map_err(|_| CliError::Usage(format!("invalid value for {key}: {s:?}"))),
        }
    }

    pub fn opt_f64(&self, key: &str) -> Result<Option<f64>, CliError> {
        let v: Option<f64> = self.parse(key)?;
        if let Some(x) = v {
            if !x.is_finite() {
                return Err(CliError::Usage(format!("{key} must be finite")));
            }
            self.used.borrow_mut().insert(key.to_string(), Value::from(x));
        }
        Ok(v)
    }

    pub fn f64_or(&self, key: &str, default: f64) -> Result<f64, CliError> {
        let v = self.opt_f64(key)?.unwrap_or(default);
        self.used.borrow_mut().insert(key.to_string(), Value::from(v));
        Ok(v)
    }

    pub fn usize_or(&self, key: &str, default: usize) -> Result<usize, CliError> {
        let v: usize = self.parse(key)?.unwrap_or(default);
        self.used.borrow_mut().insert(key.to_string(), Value::from(v));
        Ok(v)
    }

    pub fn string(&self, key: &str) -> Option<String> {
        let v = self.values.get(key).cloned();
        if let Some(s) = &v {
            self.used.borrow_mut().insert(key.to_string(), Value::from(s.clone()));
        }
        v
    }

    /// Every setting read during the run, defaults included.
    pub fn echo(&self) -> Map<String, Value> {
        self.used.borrow().iter().map(|(k, v)| (k.clone(), v.clone())).collect()
    }
}
