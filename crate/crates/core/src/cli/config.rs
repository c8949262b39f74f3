//! Plain-text `key = value` configuration files.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Parsed configuration file. Keys are normalised so that `eps-min`,
/// `eps_min` and `EPS_MIN` coincide; `L` is kept as is.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ConfigFile {
    entries: BTreeMap<String, String>,
}

fn normalize(key: &str) -> String {
    let key = key.trim();
    if key == "L" {
        return key.to_string();
    }
    key.replace('-', "_").to_ascii_lowercase()
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidConfig(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Blank lines and lines starting with `#` are skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (k, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::InvalidConfig(format!("line {}: expected key = value", k + 1))
            })?;
            entries.insert(normalize(key), value.trim().to_string());
        }
        Ok(Self { entries })
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.entries.get(&normalize(key)).map(String::as_str)
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        self.raw(key)
            .map(|v| {
                v.parse::<T>()
                    .map_err(|_| Error::InvalidConfig(format!("cannot parse {key} = {v}")))
            })
            .transpose()
    }

    /// `flag` if given, else the file value.
    pub fn resolve<T: FromStr>(&self, flag: Option<T>, key: &str) -> Result<Option<T>> {
        match flag {
            Some(v) => Ok(Some(v)),
            None => self.get(key),
        }
    }
}

/// Comma-separated list of reals.
pub fn parse_list(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidConfig(format!("cannot parse {s:?} as a number")))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_normalises_keys() {
        let cfg =
            ConfigFile::parse("# sweep\nepsilon = 0.1, 0.05\nL=1\n\nEps-Min = 0.002\n").unwrap();
        assert_eq!(cfg.raw("epsilon"), Some("0.1, 0.05"));
        assert_eq!(cfg.get::<f64>("L").unwrap(), Some(1.0));
        assert_eq!(cfg.get::<f64>("eps_min").unwrap(), Some(0.002));
        assert_eq!(cfg.get::<f64>("delta").unwrap(), None);
        assert_eq!(
            parse_list(cfg.raw("epsilon").unwrap()).unwrap(),
            vec![0.1, 0.05]
        );
    }

    #[test]
    fn flags_override_file() {
        let cfg = ConfigFile::parse("L = 1").unwrap();
        assert_eq!(cfg.resolve(Some(2.0), "L").unwrap(), Some(2.0));
        assert_eq!(cfg.resolve::<f64>(None, "L").unwrap(), Some(1.0));
    }

    #[test]
    fn rejects_malformed_lines() {
        assert!(ConfigFile::parse("epsilon 0.1").is_err());
        let cfg = ConfigFile::parse("L = one").unwrap();
        assert!(matches!(cfg.get::<f64>("L"), Err(Error::InvalidConfig(_))));
    }
}
