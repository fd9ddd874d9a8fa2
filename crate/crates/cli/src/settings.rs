//! Configuration loading: file or built-in defaults, then command-line
//! overrides, then validation.

use std::fs;
use std::path::PathBuf;

use mcckf::bench::ExperimentConfig;
use sha2::{Digest, Sha256};
use toml::{Table, Value};

use crate::Common;

/// Effective configuration of one invocation.
pub struct Settings {
    pub config: ExperimentConfig,
    /// Canonical TOML of `config`.
    pub canonical: String,
    pub config_hash: String,
    pub out: PathBuf,
}

pub fn load(common: &Common, is_sweep: bool) -> Result<Settings, String> {
    let mut table = match &common.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
            text.parse::<Table>()
                .map_err(|e| format!("{}: {e}", path.display()))?
        }
        None => Table::try_from(ExperimentConfig::default()).map_err(|e| e.to_string())?,
    };
    for raw in &common.overrides {
        let (key, value) = raw
            .split_once('=')
            .ok_or_else(|| format!("override `{raw}` is not KEY=VALUE"))?;
        set_path(&mut table, key.trim(), parse_value(value.trim()))?;
    }
    if let Some(seed) = common.seed {
        let seed =
            i64::try_from(seed).map_err(|_| format!("seed {seed} exceeds the supported range"))?;
        set_path(&mut table, "monte_carlo.seed", Value::Integer(seed))?;
    }
    if let Some(runs) = common.runs {
        let key = if is_sweep {
            "sweep.runs"
        } else {
            "monte_carlo.runs"
        };
        set_path(&mut table, key, Value::Integer(runs))?;
    }
    if let Some(algs) = &common.algorithms {
        let list = algs
            .iter()
            .map(|a| Value::String(a.trim().to_string()))
            .collect();
        set_path(&mut table, "monte_carlo.algorithms", Value::Array(list))?;
    }
    if let Some(tol) = common.tolerance {
        set_path(&mut table, "monte_carlo.tolerance", Value::Float(tol))?;
    }

    let config: ExperimentConfig = Value::Table(table)
        .try_into()
        .map_err(|e: toml::de::Error| format!("invalid configuration: {}", e.message()))?;
    config
        .validate()
        .map_err(|e| format!("invalid configuration: {e}"))?;
    let canonical = toml::to_string(&config).map_err(|e| e.to_string())?;
    let config_hash = format!("{:x}", Sha256::digest(canonical.as_bytes()));
    Ok(Settings {
        config,
        canonical,
        config_hash,
        out: common.out.clone(),
    })
}

/// A TOML literal when it parses as one, otherwise a bare string.
fn parse_value(raw: &str) -> Value {
    format!("v = {raw}")
        .parse::<Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| Value::String(raw.to_string()))
}

fn set_path(table: &mut Table, key: &str, value: Value) -> Result<(), String> {
    let mut parts: Vec<&str> = key.split('.').collect();
    let last = parts
        .pop()
        .filter(|s| !s.is_empty())
        .ok_or_else(|| format!("empty override key `{key}`"))?;
    let mut cur = table;
    for part in parts {
        let entry = cur
            .entry(part)
            .or_insert_with(|| Value::Table(Table::new()));
        cur = entry
            .as_table_mut()
            .ok_or_else(|| format!("override `{key}`: `{part}` is not a section"))?;
    }
    cur.insert(last.to_string(), value);
    Ok(())
}
