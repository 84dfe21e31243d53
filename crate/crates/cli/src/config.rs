use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use yamabe_core::continuation::ContinuationConfig;
use yamabe_core::discretize::{build_grid, DiscreteSystem};
use yamabe_core::geometry::FDScheme;
use yamabe_core::model::ModelParams;

use crate::error::CliError;

/// Every run parameter. Unset keys take the defaults below.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub n: usize,
    pub delta: f64,
    pub q: f64,
    pub k: usize,
    /// Polynomial degree of the collocation grid.
    #[serde(rename = "N")]
    pub grid_degree: usize,
    /// Gauss points for weighted products; `N + 2` when unset.
    pub quad_points: Option<usize>,
    pub newton_tol: f64,
    pub max_iter: usize,
    pub ds_init: f64,
    pub ds_min: f64,
    pub ds_max: f64,
    pub sigma_tol: f64,
    /// `1e-3 lambda_1` when unset.
    pub lambda_floor: Option<f64>,
    pub s0: f64,
    pub max_points: usize,
    pub s_max: f64,
    pub h: f64,
    pub sample_count: usize,
    pub seed: u64,
    pub output_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        let c = ContinuationConfig::default();
        Self {
            n: 2,
            delta: 1.0,
            q: 3.0,
            k: 2,
            grid_degree: 96,
            quad_points: None,
            newton_tol: c.newton_tol,
            max_iter: c.max_iter,
            ds_init: c.ds_init,
            ds_min: c.ds_min,
            ds_max: c.ds_max,
            sigma_tol: c.sigma_tol,
            lambda_floor: c.lambda_floor,
            s0: c.s0,
            max_points: c.max_points,
            s_max: c.s_max,
            h: FDScheme::default().h(),
            sample_count: 200,
            seed: 0,
            output_dir: PathBuf::from("out"),
        }
    }
}

/// Keys read as floats; integer literals are accepted for them.
const FLOAT_KEYS: &[&str] = &[
    "delta", "q", "newton_tol", "ds_init", "ds_min", "ds_max", "sigma_tol", "lambda_floor", "s0",
    "s_max", "h",
];

fn promote_ints(table: &mut toml::Table) {
    for key in FLOAT_KEYS {
        if let Some(toml::Value::Integer(i)) = table.get(*key) {
            let f = *i as f64;
            table.insert((*key).to_string(), toml::Value::Float(f));
        }
    }
}

/// Parse `key=value`; values that are not TOML literals are taken as strings.
fn parse_override(item: &str) -> Result<(String, toml::Value), CliError> {
    let (key, value) = item
        .split_once('=')
        .ok_or_else(|| CliError::Config(format!("override {item:?} is not of the form key=value")))?;
    let key = key.trim();
    if key.is_empty() {
        return Err(CliError::Config(format!("override {item:?} has an empty key")));
    }
    let value = value.trim();
    let parsed = format!("v = {value}")
        .parse::<toml::Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(value.to_string()));
    Ok((key.to_string(), parsed))
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, CliError> {
        Self::from_parts(text, &[])
    }

    /// Parse a TOML document, apply `key=value` overrides, and validate.
    pub fn from_parts(text: &str, overrides: &[String]) -> Result<Self, CliError> {
        let mut table: toml::Table = text.parse().map_err(|e: toml::de::Error| {
            let line = e
                .span()
                .map(|s| text[..s.start.min(text.len())].matches('\n').count() + 1)
                .map(|l| format!(" at line {l}: {:?}", text.lines().nth(l - 1).unwrap_or("")))
                .unwrap_or_default();
            CliError::Config(format!("cannot parse config{line}: {}", e.message()))
        })?;
        for item in overrides {
            let (key, value) = parse_override(item)?;
            table.insert(key, value);
        }
        promote_ints(&mut table);
        let cfg: RunConfig = toml::Value::Table(table)
            .try_into()
            .map_err(|e: toml::de::Error| CliError::Config(e.message().to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: Option<&Path>, overrides: &[String]) -> Result<Self, CliError> {
        let text = match path {
            Some(p) => std::fs::read_to_string(p)
                .map_err(|e| CliError::Config(format!("cannot read {}: {e}", p.display())))?,
            None => String::new(),
        };
        Self::from_parts(&text, overrides)
    }

    pub fn params(&self) -> Result<ModelParams, CliError> {
        ModelParams::new(self.n, self.delta, self.q).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn continuation(&self) -> ContinuationConfig {
        ContinuationConfig {
            newton_tol: self.newton_tol,
            max_iter: self.max_iter,
            ds_init: self.ds_init,
            ds_min: self.ds_min,
            ds_max: self.ds_max,
            sigma_tol: self.sigma_tol,
            s0: self.s0,
            lambda_floor: self.lambda_floor,
            max_points: self.max_points,
            s_max: self.s_max,
        }
    }

    pub fn quad_points(&self) -> usize {
        self.quad_points.unwrap_or(self.grid_degree + 2)
    }

    pub fn scheme(&self) -> Result<FDScheme, CliError> {
        FDScheme::new(self.h).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn system(&self) -> Result<DiscreteSystem, CliError> {
        let grid = build_grid(self.grid_degree).map_err(|e| CliError::Config(e.to_string()))?;
        DiscreteSystem::new(grid, self.params()?, self.quad_points()).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.params()?;
        self.continuation()
            .validate()
            .map_err(|e| CliError::Config(e.to_string()))?;
        self.scheme()?;
        if self.k == 0 {
            return Err(CliError::Config("k must be at least 1".into()));
        }
        if self.grid_degree < 2 {
            return Err(CliError::Config(format!("N must be at least 2, got {}", self.grid_degree)));
        }
        if self.k > self.grid_degree - 1 {
            return Err(CliError::Config(format!(
                "k = {} is not resolved by N = {} (need k <= N - 1)",
                self.k, self.grid_degree
            )));
        }
        if self.quad_points() <= self.grid_degree {
            return Err(CliError::Config(format!(
                "quad_points must exceed N = {} for exact weighted products, got {}",
                self.grid_degree,
                self.quad_points()
            )));
        }
        if self.sample_count == 0 {
            return Err(CliError::Config("sample_count must be at least 1".into()));
        }
        if self.max_points < 3 {
            return Err(CliError::Config("max_points must be at least 3".into()));
        }
        Ok(())
    }
}
