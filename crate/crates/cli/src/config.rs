use serde::Serialize;
use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

/// A malformed flag, config line or parameter value.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

fn bad(msg: impl Into<String>) -> ConfigError {
    ConfigError(msg.into())
}

/// Everything that determines a run. Defaults are written back as they are
/// read, so the echoed config is the resolved one.
#[derive(Debug, Clone, Serialize)]
pub struct ExperimentConfig {
    pub command: String,
    pub preset: Option<String>,
    pub epsilon: Option<f64>,
    pub word_ball: Option<usize>,
    pub radius: Option<f64>,
    pub seed: u64,
    pub format: Format,
    pub params: BTreeMap<String, String>,
    #[serde(skip)]
    used: RefCell<BTreeSet<String>>,
}

impl ExperimentConfig {
    pub fn new(command: &str) -> Self {
        Self {
            command: command.to_string(),
            preset: None,
            epsilon: None,
            word_ball: None,
            radius: None,
            seed: 0,
            format: Format::Json,
            params: BTreeMap::new(),
            used: RefCell::new(BTreeSet::new()),
        }
    }

    /// Applies one `key = value` setting; the named flags are recognized,
    /// anything else becomes a command parameter.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let key = key.trim().replace('_', "-");
        let value = value.trim();
        match key.as_str() {
            "preset" => self.preset = Some(value.to_string()),
            "epsilon" => self.epsilon = Some(parse(&key, value)?),
            "word-ball" => self.word_ball = Some(parse(&key, value)?),
            "radius" => self.radius = Some(parse(&key, value)?),
            "seed" => self.seed = parse(&key, value)?,
            "format" => {
                self.format = match value {
                    "json" => Format::Json,
                    "csv" => Format::Csv,
                    _ => return Err(bad(format!("format must be json or csv, got '{value}'"))),
                }
            }
            "command" => {
                if value != self.command {
                    return Err(bad(format!("config is for '{value}', not '{}'", self.command)));
                }
            }
            "" => return Err(bad("empty key")),
            _ => {
                self.params.insert(key, value.to_string());
            }
        }
        Ok(())
    }

    /// Reads a config file of `key = value` lines; `#` starts a comment.
    pub fn apply_file(&mut self, text: &str) -> Result<(), ConfigError> {
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| bad(format!("config line {}: expected key = value, got '{line}'", n + 1)))?;
            self.set(k, v).map_err(|e| bad(format!("config line {}: {e}", n + 1)))?;
        }
        Ok(())
    }

    pub fn preset_or(&mut self, default: &str) -> String {
        self.preset.get_or_insert_with(|| default.to_string()).clone()
    }

    pub fn epsilon_or(&mut self, default: f64) -> f64 {
        *self.epsilon.get_or_insert(default)
    }

    pub fn word_ball_or(&mut self, default: usize) -> usize {
        *self.word_ball.get_or_insert(default)
    }

    pub fn radius_or(&mut self, default: f64) -> f64 {
        *self.radius.get_or_insert(default)
    }

    /// A command parameter, parsed, with its default recorded.
    pub fn param<T: FromStr>(&mut self, key: &str, default: &str) -> Result<T, ConfigError> {
        self.used.borrow_mut().insert(key.to_string());
        let raw = self.params.entry(key.to_string()).or_insert_with(|| default.to_string()).clone();
        parse(key, &raw)
    }

    /// A parameter with no default; absent stays absent in the echo.
    pub fn opt_param<T: FromStr>(&mut self, key: &str) -> Result<Option<T>, ConfigError> {
        self.used.borrow_mut().insert(key.to_string());
        self.params.get(key).map(|raw| parse(key, raw)).transpose()
    }

    /// A comma-separated list parameter.
    pub fn list<T: FromStr>(&mut self, key: &str, default: &str) -> Result<Vec<T>, ConfigError> {
        let raw: String = self.param(key, default)?;
        raw.split(',').filter(|s| !s.trim().is_empty()).map(|s| parse(key, s.trim())).collect()
    }

    /// Fails on parameters the command never read (typos, wrong command).
    pub fn check_unused(&self) -> Result<(), ConfigError> {
        let used = self.used.borrow();
        let extra: Vec<&String> = self.params.keys().filter(|k| !used.contains(*k)).collect();
        if extra.is_empty() {
            Ok(())
        } else {
            Err(bad(format!("unknown parameter(s) for {}: {:?}", self.command, extra)))
        }
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T, ConfigError> {
    value.trim().parse().map_err(|_| bad(format!("cannot parse {key} = '{value}'")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_overrides_and_params() {
        let mut c = ExperimentConfig::new("solvable");
        c.epsilon = Some(0.5);
        c.apply_file("# comment\nepsilon = 0.25\nprimes = 5, 7\n\nseed=9 # trailing\n").unwrap();
        assert_eq!(c.epsilon, Some(0.25));
        assert_eq!(c.seed, 9);
        assert_eq!(c.list::<u64>("primes", "2").unwrap(), vec![5, 7]);
        assert_eq!(c.param::<usize>("m", "3").unwrap(), 3);
        assert_eq!(c.params["m"], "3");
        c.check_unused().unwrap();
    }

    #[test]
    fn malformed_lines_are_rejected() {
        let mut c = ExperimentConfig::new("span");
        assert!(c.apply_file("epsilon 0.2").is_err());
        assert!(c.apply_file("epsilon = abc").is_err());
        assert!(c.apply_file("command = jordan").is_err());
        c.apply_file("typo = 1").unwrap();
        assert!(c.check_unused().is_err());
    }
}
