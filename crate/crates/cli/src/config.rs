//! TOML experiment configs with dotted `key=value` overrides and a stable hash.

use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context};
use serde::de::DeserializeOwned;
use sha2::{Digest, Sha256};
use toml::{Table, Value};

#[derive(Clone, Debug)]
pub struct Config {
    pub path: PathBuf,
    pub table: Table,
}

impl Config {
    pub fn load(path: &Path, overrides: &[String]) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let mut cfg = Config::parse(&text, overrides)?;
        cfg.path = path.to_path_buf();
        Ok(cfg)
    }

    pub fn parse(text: &str, overrides: &[String]) -> anyhow::Result<Self> {
        let mut table: Table = text.parse().context("parsing config")?;
        for o in overrides {
            apply_override(&mut table, o)?;
        }
        Ok(Config { path: PathBuf::new(), table })
    }

    /// The whole config read as `T`; absent sections fall back to `T`'s defaults.
    pub fn get<T: DeserializeOwned>(&self) -> anyhow::Result<T> {
        Value::Table(self.table.clone()).try_into().context("config does not match the subcommand's schema")
    }

    /// First 16 hex digits of the SHA-256 of the canonical serialization.
    pub fn hash(&self) -> String {
        let canonical = toml::to_string(&self.table).expect("tables serialize");
        Sha256::digest(canonical.as_bytes()).iter().take(8).map(|b| format!("{b:02x}")).collect()
    }

    /// `(dotted key, value)` for every leaf, in key order.
    pub fn flattened(&self) -> Vec<(String, String)> {
        let mut out = vec![];
        flatten("", &self.table, &mut out);
        out
    }
}

fn flatten(prefix: &str, t: &Table, out: &mut Vec<(String, String)>) {
    let mut keys: Vec<&String> = t.keys().collect();
    keys.sort();
    for k in keys {
        let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
        match &t[k] {
            Value::Table(sub) => flatten(&key, sub, out),
            v => out.push((key, v.to_string())),
        }
    }
}

/// `a.b.c=value`, where the value is read as TOML and otherwise as a string.
pub fn apply_override(table: &mut Table, spec: &str) -> anyhow::Result<()> {
    let (key, raw) = spec.split_once('=').ok_or_else(|| anyhow!("override `{spec}` is not key=value"))?;
    let path: Vec<&str> = key.trim().split('.').collect();
    if path.iter().any(|p| p.is_empty()) {
        bail!("override key `{key}` has an empty segment");
    }
    let raw = raw.trim();
    let value = format!("v = {raw}")
        .parse::<Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| Value::String(raw.to_string()));

    let (last, parents) = path.split_last().expect("nonempty path");
    let mut cur = table;
    for p in parents {
        let entry = cur.entry(p.to_string()).or_insert_with(|| Value::Table(Table::new()));
        cur = entry.as_table_mut().ok_or_else(|| anyhow!("override `{key}`: `{p}` is not a section"))?;
    }
    cur.insert(last.to_string(), value);
    Ok(())
}
