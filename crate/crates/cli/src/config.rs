//! Plain `key = value` config files. Flags always win over config values.

use std::collections::HashMap;
use std::path::Path;
use std::str::FromStr;

use anyhow::{Context, Result, anyhow};

/// Keys a config file may define, mirroring the long flag names.
const ALLOWED_KEYS: &[&str] = &[
    "form",
    "r",
    "N",
    "N-schedule",
    "variant",
    "p",
    "iota",
    "trials",
    "seed",
    "threads",
    "mem-cap",
    "out",
    "tolerance",
];

/// Parsed config file (possibly empty when no file was given).
pub struct ConfigMap {
    values: HashMap<String, String>,
}

impl ConfigMap {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let mut values = HashMap::new();
        if let Some(path) = path {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("cannot read config {}", path.display()))?;
            for (lineno, line) in text.lines().enumerate() {
                let line = line.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let (key, value) = line.split_once('=').ok_or_else(|| {
                    anyhow!(
                        "{}:{}: expected `key = value`, got {line:?}",
                        path.display(),
                        lineno + 1
                    )
                })?;
                let key = key.trim();
                if !ALLOWED_KEYS.contains(&key) {
                    return Err(anyhow!(
                        "{}:{}: unknown config key {key:?}",
                        path.display(),
                        lineno + 1
                    ));
                }
                values.insert(key.to_string(), value.trim().to_string());
            }
        }
        Ok(Self { values })
    }

    fn raw(&self, key: &str, cli: Option<String>) -> Option<String> {
        cli.or_else(|| self.values.get(key).cloned())
    }

    /// Merges a string-valued flag with the config and parses the winner.
    pub fn parse_opt<T>(
        &self,
        key: &str,
        cli: Option<String>,
        parse: impl FnOnce(&str) -> Result<T>,
    ) -> Result<Option<T>> {
        match self.raw(key, cli) {
            None => Ok(None),
            Some(s) => parse(&s)
                .map(Some)
                .with_context(|| format!("value for {key:?}")),
        }
    }

    /// Like [`parse_opt`](Self::parse_opt), but the value must come from
    /// the flag or the config.
    pub fn parse_req<T>(
        &self,
        key: &str,
        cli: Option<String>,
        parse: impl FnOnce(&str) -> Result<T>,
    ) -> Result<T> {
        self.parse_opt(key, cli, parse)?
            .ok_or_else(|| anyhow!("missing required --{key} (flag or config)"))
    }

    /// Merges a flag clap already parsed, falling back to `FromStr` on the
    /// config value.
    pub fn typed_opt<T>(&self, key: &str, cli: Option<T>) -> Result<Option<T>>
    where
        T: FromStr,
        T::Err: std::fmt::Display,
    {
        if cli.is_some() {
            return Ok(cli);
        }
        match self.values.get(key) {
            None => Ok(None),
            Some(raw) => raw
                .parse::<T>()
                .map(Some)
                .map_err(|e| anyhow!("value for {key:?}: {e}: {raw:?}")),
        }
    }

    /// Required version of [`typed_opt`](Self::typed_opt).
    pub fn typed_req<T>(&self, key: &str, cli: Option<T>) -> Result<T>
    where
        T: FromStr,
        T::Err: std::fmt::Display,
    {
        self.typed_opt(key, cli)?
            .ok_or_else(|| anyhow!("missing required --{key} (flag or config)"))
    }
}

/// Comma-separated N schedule, e.g. `16,24,32,48,64`.
pub fn parse_schedule(s: &str) -> Result<Vec<u32>> {
    s.split(',')
        .map(|part| {
            part.trim()
                .parse::<u32>()
                .map_err(|e| anyhow!("{e}: {part:?}"))
        })
        .collect()
}
