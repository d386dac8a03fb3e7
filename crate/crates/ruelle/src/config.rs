//! Key/value run configuration.
//!
//! The format is plain `key = value` lines with `#` comments. Keys are
//! namespaced (`model.*`, `numerics.*`, `experiment.*`, `seed`); unknown
//! keys are rejected so typos cannot silently fall back to defaults. Every
//! run echoes its resolved configuration alongside the results.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::orbits::{FuchsianModel, HyperbolicToralMap, OrbitError, SuspensionModel};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`, got `{text}`")]
    Malformed { line: usize, text: String },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("key `{key}`: {detail}")]
    BadValue { key: String, detail: String },
    #[error(transparent)]
    Model(#[from] OrbitError),
}

#[derive(Debug, Clone, PartialEq)]
pub enum ModelKind {
    CatSuspension,
    Fuchsian,
}

/// Parsed configuration with defaults applied.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub model_kind: ModelKind,
    pub cat_entries: [i64; 4],
    pub roof: f64,
    pub potential: f64,
    pub generators: Vec<[f64; 4]>,
    pub max_word_len: usize,
    pub horizon: f64,
    pub tol: f64,
    pub grid_per_cell: usize,
    pub window: usize,
    pub quad_points: usize,
    pub seed: u64,
    /// Subcommand-specific keys, passed through untyped.
    pub experiment: BTreeMap<String, String>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            model_kind: ModelKind::CatSuspension,
            cat_entries: [2, 1, 1, 1],
            roof: 1.0,
            potential: 0.0,
            generators: Vec::new(),
            max_word_len: 6,
            horizon: 30.0,
            tol: 1e-10,
            grid_per_cell: 24,
            window: 5,
            quad_points: 64,
            seed: 0,
            experiment: BTreeMap::new(),
        }
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut config = Self::default();
        for (index, raw) in text.lines().enumerate() {
            let line = index + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let Some((key, value)) = content.split_once('=') else {
                return Err(ConfigError::Malformed { line, text: raw.trim().to_string() });
            };
            let key = key.trim();
            let value = value.trim();
            config.apply(key, value).map_err(|e| match e {
                ConfigError::UnknownKey { .. } => ConfigError::UnknownKey { line, key: key.into() },
                other => other,
            })?;
        }
        Ok(config)
    }

    fn apply(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let bad = |detail: String| ConfigError::BadValue { key: key.to_string(), detail };
        match key {
            "model.type" => {
                self.model_kind = match value {
                    "cat_suspension" => ModelKind::CatSuspension,
                    "fuchsian" => ModelKind::Fuchsian,
                    other => return Err(bad(format!("unknown model type `{other}`"))),
                };
            }
            "model.cat" => {
                let parts: Vec<i64> = value
                    .split(',')
                    .map(|p| p.trim().parse())
                    .collect::<Result<_, _>>()
                    .map_err(|e: std::num::ParseIntError| bad(e.to_string()))?;
                if parts.len() != 4 {
                    return Err(bad("expected four integers a,b,c,d".into()));
                }
                self.cat_entries = [parts[0], parts[1], parts[2], parts[3]];
            }
            "model.roof" => self.roof = parse_f64(value).map_err(bad)?,
            "model.potential" => self.potential = parse_f64(value).map_err(bad)?,
            "model.generators" => {
                self.generators = value
                    .split(';')
                    .map(|tuple| -> Result<[f64; 4], String> {
                        let parts: Vec<f64> = tuple
                            .split(',')
                            .map(|p| p.trim().parse())
                            .collect::<Result<_, _>>()
                            .map_err(|e: std::num::ParseFloatError| e.to_string())?;
                        if parts.len() != 4 {
                            return Err("generator needs four entries".into());
                        }
                        Ok([parts[0], parts[1], parts[2], parts[3]])
                    })
                    .collect::<Result<_, _>>()
                    .map_err(bad)?;
            }
            "model.max_word_len" => self.max_word_len = parse_usize(value).map_err(bad)?,
            "numerics.horizon" => self.horizon = parse_f64(value).map_err(bad)?,
            "numerics.tol" => self.tol = parse_f64(value).map_err(bad)?,
            "numerics.grid_per_cell" => self.grid_per_cell = parse_usize(value).map_err(bad)?,
            "numerics.window" => self.window = parse_usize(value).map_err(bad)?,
            "numerics.quad_points" => self.quad_points = parse_usize(value).map_err(bad)?,
            "seed" => self.seed = value.parse().map_err(|e: std::num::ParseIntError| bad(e.to_string()))?,
            _ => {
                if let Some(name) = key.strip_prefix("experiment.") {
                    self.experiment.insert(name.to_string(), value.to_string());
                } else {
                    return Err(ConfigError::UnknownKey { line: 0, key: key.to_string() });
                }
            }
        }
        Ok(())
    }

    pub fn cat_map(&self) -> Result<HyperbolicToralMap, ConfigError> {
        Ok(HyperbolicToralMap::new(
            self.cat_entries[0],
            self.cat_entries[1],
            self.cat_entries[2],
            self.cat_entries[3],
        )?)
    }

    pub fn suspension(&self) -> Result<SuspensionModel, ConfigError> {
        Ok(SuspensionModel::new(self.cat_map()?, self.roof, self.potential)?)
    }

    pub fn fuchsian(&self) -> Result<FuchsianModel, ConfigError> {
        Ok(FuchsianModel::new(self.generators.clone(), self.max_word_len)?)
    }

    /// The resolved key/value view echoed into every output.
    pub fn resolved(&self) -> BTreeMap<String, String> {
        let mut map = BTreeMap::new();
        map.insert(
            "model.type".into(),
            match self.model_kind {
                ModelKind::CatSuspension => "cat_suspension".into(),
                ModelKind::Fuchsian => "fuchsian".to_string(),
            },
        );
        map.insert(
            "model.cat".into(),
            format!(
                "{},{},{},{}",
                self.cat_entries[0], self.cat_entries[1], self.cat_entries[2], self.cat_entries[3]
            ),
        );
        map.insert("model.roof".into(), self.roof.to_string());
        map.insert("model.potential".into(), self.potential.to_string());
        if !self.generators.is_empty() {
            map.insert(
                "model.generators".into(),
                self.generators
                    .iter()
                    .map(|g| format!("{},{},{},{}", g[0], g[1], g[2], g[3]))
                    .collect::<Vec<_>>()
                    .join(";"),
            );
            map.insert("model.max_word_len".into(), self.max_word_len.to_string());
        }
        map.insert("numerics.horizon".into(), self.horizon.to_string());
        map.insert("numerics.tol".into(), self.tol.to_string());
        map.insert("numerics.grid_per_cell".into(), self.grid_per_cell.to_string());
        map.insert("numerics.window".into(), self.window.to_string());
        map.insert("numerics.quad_points".into(), self.quad_points.to_string());
        map.insert("seed".into(), self.seed.to_string());
        for (k, v) in &self.experiment {
            map.insert(format!("experiment.{k}"), v.clone());
        }
        map
    }
}

fn parse_f64(value: &str) -> Result<f64, String> {
    value.parse().map_err(|e: std::num::ParseFloatError| e.to_string())
}

fn parse_usize(value: &str) -> Result<usize, String> {
    value.parse().map_err(|e: std::num::ParseIntError| e.to_string())
}
