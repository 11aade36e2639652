//! Flat `key = value` settings layered as preset, file, then overrides.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use robust_mdp::experiments::Preset;

use crate::error::{CliError, CliResult};

/// Every key any command understands.
const KNOWN: &[&str] = &[
    "n_draws",
    "lambda_steps",
    "theta_steps",
    "lambda_grid",
    "n_states",
    "bin_width",
    "replacement_cost",
    "maintenance_slope",
    "discount",
    "max_jump",
    "pooled_n_obs",
    "kappa",
    "max_iter",
    "data",
    "synthetic_buses",
    "synthetic_months",
    "omegas",
    "n_obs_variants",
    "state",
    "omega_primes",
    "evaluation",
    "n_buses",
    "n_months",
    "shock_scale",
    "recorded_buses",
    "path_stride",
    "window",
    "poly_order",
    "increment",
    "samples_per_point",
    "draws_per_sample",
    "omega_grid",
    "contrast_omega",
    "surface",
    "spec",
];

#[derive(Debug, Clone)]
pub struct Settings {
    pub preset: Preset,
    pub seed: u64,
    values: BTreeMap<String, String>,
}

fn parse_line(line: &str) -> CliResult<Option<(String, String)>> {
    let line = line.split('#').next().unwrap_or("").trim();
    if line.is_empty() {
        return Ok(None);
    }
    let (k, v) = line
        .split_once('=')
        .ok_or_else(|| CliError::Config(format!("expected key=value, got {line:?}")))?;
    let key = k.trim().to_string();
    if !KNOWN.contains(&key.as_str()) {
        return Err(CliError::Config(format!("unknown setting {key:?}")));
    }
    Ok(Some((key, v.trim().to_string())))
}

impl Settings {
    pub fn load(preset: Preset, seed: u64, file: Option<&Path>, overrides: &[String]) -> CliResult<Self> {
        let mut values = BTreeMap::new();
        if let Some(path) = file {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
            for (i, line) in text.lines().enumerate() {
                if let Some((k, v)) =
                    parse_line(line).map_err(|e| CliError::Config(format!("{}:{}: {e}", path.display(), i + 1)))?
                {
                    values.insert(k, v);
                }
            }
        }
        for o in overrides {
            if let Some((k, v)) = parse_line(o)? {
                values.insert(k, v);
            }
        }
        Ok(Self { preset, seed, values })
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn get<T: FromStr>(&self, key: &str, default: T) -> CliResult<T> {
        match self.raw(key) {
            None => Ok(default),
            Some(v) => v
                .parse()
                .map_err(|_| CliError::Config(format!("cannot parse {key} = {v:?}"))),
        }
    }

    pub fn list(&self, key: &str, default: &[f64]) -> CliResult<Vec<f64>> {
        match self.raw(key) {
            None => Ok(default.to_vec()),
            Some(v) => v
                .split(',')
                .map(|s| {
                    s.trim()
                        .parse()
                        .map_err(|_| CliError::Config(format!("cannot parse {key} entry {s:?}")))
                })
                .collect(),
        }
    }

    pub fn list_u64(&self, key: &str, default: &[u64]) -> CliResult<Vec<u64>> {
        match self.raw(key) {
            None => Ok(default.to_vec()),
            Some(v) => v
                .split(',')
                .map(|s| {
                    s.trim()
                        .parse()
                        .map_err(|_| CliError::Config(format!("cannot parse {key} entry {s:?}")))
                })
                .collect(),
        }
    }
}
