//! Thresholds and output settings, from a `key=value` file overridden by flags.

use std::fmt;
use std::str::FromStr;

use conceptkit::ui::CheckConfig;
use thiserror::Error;

pub const MAX_DEPTH: usize = 8;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    #[default]
    Text,
    Lines,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "text" => Ok(Format::Text),
            "lines" => Ok(Format::Lines),
            _ => Err(format!("unknown format {s}; expected text or lines")),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Text => "text",
            Format::Lines => "lines",
        })
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ConfigError {
    #[error("{path}:{line}: expected key=value")]
    Syntax { path: String, line: usize },
    #[error("{path}:{line}: unknown key {key}")]
    UnknownKey { path: String, line: usize, key: String },
    #[error("{origin}: bad value for {key}: {message}")]
    Value { origin: String, key: String, message: String },
    #[error("{0}")]
    Range(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CliConfig {
    pub check: CheckConfig,
    pub format: Format,
    pub color: bool,
}

impl Default for CliConfig {
    fn default() -> Self {
        CliConfig { check: CheckConfig::default(), format: Format::Text, color: true }
    }
}

fn parse<T: FromStr>(origin: &str, key: &str, value: &str) -> Result<T, ConfigError>
where
    T::Err: fmt::Display,
{
    value.trim().parse().map_err(|e: T::Err| ConfigError::Value {
        origin: origin.to_string(),
        key: key.to_string(),
        message: e.to_string(),
    })
}

impl CliConfig {
    /// Applies one setting. Returns `false` for an unknown key.
    pub fn set(&mut self, origin: &str, key: &str, value: &str) -> Result<bool, ConfigError> {
        let c = &mut self.check;
        match key {
            "depth" => c.depth = parse(origin, key, value)?,
            "max_steps" | "max-steps" => c.max_steps = parse(origin, key, value)?,
            "epsilon" => c.epsilon = parse(origin, key, value)?,
            "max_ratio" | "max-ratio" => c.max_ratio = parse(origin, key, value)?,
            "evoke_k" | "evoke-k" => c.evoke_k = parse(origin, key, value)?,
            "min_prominence" | "min-prominence" => c.min_prominence = parse(origin, key, value)?,
            "sample_depth" | "sample-depth" => c.sample_depth = parse(origin, key, value)?,
            "state_cap" | "state-cap" => c.state_cap = parse(origin, key, value)?,
            "format" => self.format = parse(origin, key, value)?,
            "color" => self.color = parse(origin, key, value)?,
            _ => return Ok(false),
        }
        Ok(true)
    }

    /// Reads a config file. Blank lines and lines starting with `#` are ignored.
    pub fn apply_file(&mut self, path: &str, text: &str) -> Result<(), ConfigError> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return Err(ConfigError::Syntax { path: path.to_string(), line: i + 1 });
            };
            let k = k.trim();
            if !self.set(&format!("{path}:{}", i + 1), k, v)? {
                return Err(ConfigError::UnknownKey { path: path.to_string(), line: i + 1, key: k.to_string() });
            }
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let c = &self.check;
        if c.depth == 0 || c.depth > MAX_DEPTH {
            return Err(ConfigError::Range(format!("depth must be between 1 and {MAX_DEPTH}, got {}", c.depth)));
        }
        let positive = [
            ("max-steps", c.max_steps as u64),
            ("epsilon", c.epsilon.0 as u64),
            ("max-ratio", c.max_ratio.0 as u64),
            ("evoke-k", c.evoke_k as u64),
            ("min-prominence", c.min_prominence.0 as u64),
            ("sample-depth", c.sample_depth as u64),
            ("state-cap", c.state_cap as u64),
        ];
        for (name, v) in positive {
            if v == 0 {
                return Err(ConfigError::Range(format!("{name} must be positive")));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use conceptkit::ui::Milli;

    #[test]
    fn file_then_validate() {
        let mut c = CliConfig::default();
        c.apply_file("t.conf", "# pinned\ndepth = 2\nepsilon=0.35\n\nformat=lines\n").unwrap();
        assert_eq!(c.check.depth, 2);
        assert_eq!(c.check.epsilon, Milli(350));
        assert_eq!(c.format, Format::Lines);
        c.validate().unwrap();
    }

    #[test]
    fn rejects_bad_files() {
        let mut c = CliConfig::default();
        assert_eq!(c.apply_file("t", "depth"), Err(ConfigError::Syntax { path: "t".into(), line: 1 }));
        assert!(matches!(c.apply_file("t", "speed=3"), Err(ConfigError::UnknownKey { .. })));
        assert!(matches!(c.apply_file("t", "epsilon=-1"), Err(ConfigError::Value { .. })));
    }

    #[test]
    fn ranges() {
        let mut c = CliConfig::default();
        c.check.depth = 9;
        assert!(c.validate().is_err());
        c.check.depth = 8;
        c.validate().unwrap();
        c.check.epsilon = Milli(0);
        assert!(c.validate().is_err());
    }
}
