//! `key = value` configuration files. Flags given on the command line take
//! precedence over anything read here.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use crate::CliError;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FileConfig {
    values: BTreeMap<String, String>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut values = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("config line {}: expected key = value", i + 1)))?;
            values.insert(k.trim().replace('-', "_"), v.trim().to_string());
        }
        Ok(FileConfig { values })
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>, CliError>
    where
        T::Err: std::fmt::Display,
    {
        self.raw(key)
            .map(|v| v.parse::<T>().map_err(|e| CliError::Usage(format!("config key {key}: {e}"))))
            .transpose()
    }

    pub fn flag(&self, key: &str) -> Result<bool, CliError> {
        match self.raw(key) {
            None => Ok(false),
            Some("true" | "yes" | "1") => Ok(true),
            Some("false" | "no" | "0") => Ok(false),
            Some(v) => Err(CliError::Usage(format!("config key {key}: expected a boolean, got {v:?}"))),
        }
    }
}

/// The flag if given, else the file value.
pub fn pick<T: FromStr>(flag: Option<T>, file: &FileConfig, key: &str) -> Result<Option<T>, CliError>
where
    T::Err: std::fmt::Display,
{
    match flag {
        Some(v) => Ok(Some(v)),
        None => file.get(key),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_dashes() {
        let c = FileConfig::parse("# run\nrank = 3\nn-max=2 # trailing\n\nmode = refined\n").unwrap();
        assert_eq!(c.get::<usize>("rank").unwrap(), Some(3));
        assert_eq!(c.get::<u32>("n_max").unwrap(), Some(2));
        assert_eq!(c.raw("mode"), Some("refined"));
        assert!(FileConfig::parse("rank 3").is_err());
        assert!(c.get::<usize>("mode").is_err());
    }

    #[test]
    fn flags_win() {
        let c = FileConfig::parse("seed = 5").unwrap();
        assert_eq!(pick(Some(9u64), &c, "seed").unwrap(), Some(9));
        assert_eq!(pick(None::<u64>, &c, "seed").unwrap(), Some(5));
        assert_eq!(pick(None::<u64>, &c, "workers").unwrap(), None);
    }
}
