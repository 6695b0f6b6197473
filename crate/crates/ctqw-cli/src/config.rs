//! Flat `key = value` config files. Flags win over config entries, config
//! entries win over built-in defaults.

use std::collections::HashMap;
use std::fmt::Display;
use std::path::Path;
use std::str::FromStr;

use crate::CliError;

#[derive(Debug, Default)]
pub struct Config {
    entries: HashMap<String, String>,
}

impl Config {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::io(format!("reading config {}", path.display()), e))?;
        let mut entries = HashMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(CliError::Config(format!(
                    "{}:{}: expected 'key = value', got '{raw}'",
                    path.display(),
                    lineno + 1
                )));
            };
            entries.insert(key.trim().to_string(), value.trim().to_string());
        }
        Ok(Self { entries })
    }

    fn raw(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    /// Flag value if given, else the parsed config entry, else the default.
    pub fn resolve<T>(&self, flag: Option<T>, key: &str, default: T) -> Result<T, CliError>
    where
        T: FromStr,
        T::Err: Display,
    {
        if let Some(v) = flag {
            return Ok(v);
        }
        match self.raw(key) {
            Some(text) => text
                .parse::<T>()
                .map_err(|e| CliError::Config(format!("config key '{key}': {e}"))),
            None => Ok(default),
        }
    }

    /// As [`Self::resolve`] without a default.
    pub fn resolve_opt<T>(&self, flag: Option<T>, key: &str) -> Result<Option<T>, CliError>
    where
        T: FromStr,
        T::Err: Display,
    {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.raw(key) {
            Some(text) => text
                .parse::<T>()
                .map(Some)
                .map_err(|e| CliError::Config(format!("config key '{key}': {e}"))),
            None => Ok(None),
        }
    }

    /// Boolean switch: a bare flag wins; else a config entry (true/false).
    pub fn resolve_switch(&self, flag: bool, key: &str) -> Result<bool, CliError> {
        if flag {
            return Ok(true);
        }
        match self.raw(key) {
            Some(text) => text
                .parse::<bool>()
                .map_err(|e| CliError::Config(format!("config key '{key}': {e}"))),
            None => Ok(false),
        }
    }
}

/// Comma-separated float list, e.g. `--times 0,12.5,100`.
#[derive(Debug, Clone)]
pub struct FloatList(pub Vec<f64>);

impl FromStr for FloatList {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.split(',')
            .map(|p| p.trim().parse::<f64>().map_err(|e| format!("'{p}': {e}")))
            .collect::<Result<Vec<_>, _>>()
            .map(FloatList)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_resolves() {
        let dir = std::env::temp_dir().join("ctqw-config-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("run.cfg");
        std::fs::write(&path, "# comment\nn = 64\nfull-horizon = true\n").unwrap();
        let cfg = Config::load(Some(&path)).unwrap();
        assert_eq!(cfg.resolve::<usize>(None, "n", 10).unwrap(), 64);
        assert_eq!(cfg.resolve::<usize>(Some(5), "n", 10).unwrap(), 5);
        assert_eq!(cfg.resolve::<usize>(None, "missing", 10).unwrap(), 10);
        assert!(cfg.resolve_switch(false, "full-horizon").unwrap());
    }

    #[test]
    fn rejects_malformed_lines() {
        let dir = std::env::temp_dir().join("ctqw-config-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("bad.cfg");
        std::fs::write(&path, "just words\n").unwrap();
        assert!(Config::load(Some(&path)).is_err());
    }

    #[test]
    fn float_lists_parse() {
        let list: FloatList = "0, 12.5,1e2".parse().unwrap();
        assert_eq!(list.0, vec![0.0, 12.5, 100.0]);
        assert!("1,x".parse::<FloatList>().is_err());
    }
}
