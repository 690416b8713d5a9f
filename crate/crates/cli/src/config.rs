use std::path::{Path, PathBuf};

use dacd::grid::LatticeSpec;
use dacd::initial::{GridSpec, InitialSpec};
use dacd::solver::SolverConfig;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::failure::Failure;

pub const SCHEMA: &str = "dacd.experiment/1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    Solve,
    Properties,
    GnCheck,
    PeriodicDecay,
    Sandwich,
    Example1,
    Extremal,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::Solve => "solve",
            Kind::Properties => "properties",
            Kind::GnCheck => "gn-check",
            Kind::PeriodicDecay => "periodic-decay",
            Kind::Sandwich => "sandwich",
            Kind::Example1 => "example1",
            Kind::Extremal => "extremal",
        }
    }
}

/// Paths are resolved against the directory holding the config file.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<Kind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial: Option<InitialSpec>,
    /// Grid CSV (with its sidecar) used as initial data instead of `initial`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_file: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solver: Option<SolverConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    /// Kind-specific parameters, checked against the kind's own schema.
    #[serde(default, skip_serializing_if = "serde_json::Value::is_null")]
    pub params: serde_json::Value,
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, Failure> {
        let cfg: ExperimentConfig =
            serde_json::from_str(text).map_err(|e| Failure::Validation(format!("config: {e}")))?;
        if cfg.schema != SCHEMA {
            return Err(Failure::Validation(format!("unsupported schema {:?}, expected {SCHEMA:?}", cfg.schema)));
        }
        Ok(cfg)
    }

    pub fn params<T: DeserializeOwned + Default>(&self) -> Result<T, Failure> {
        if self.params.is_null() {
            return Ok(T::default());
        }
        serde_json::from_value(self.params.clone()).map_err(|e| Failure::Validation(format!("params: {e}")))
    }

    pub fn require_solver(&self) -> Result<&SolverConfig, Failure> {
        let s = self.solver.as_ref().ok_or_else(|| missing("solver"))?;
        s.validate().map_err(|e| Failure::Validation(e.to_string()))?;
        Ok(s)
    }

    pub fn resolve(&self, base: &Path, p: &Path) -> PathBuf {
        if p.is_absolute() { p.to_path_buf() } else { base.join(p) }
    }
}

pub fn missing(field: &str) -> Failure {
    Failure::Validation(format!("config field `{field}` is required for this kind"))
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PropertiesParams {
    /// Nonnegative perturbation added to the data for a second run; enables
    /// the pairwise checks.
    #[serde(default)]
    pub perturbation: Option<InitialSpec>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PeriodicDecayParams {
    #[serde(default)]
    pub lattice: Option<LatticeSpec>,
    #[serde(default = "default_fraction")]
    pub fraction: f64,
    #[serde(default = "default_xi_bound")]
    pub xi_bound: i64,
}

impl Default for PeriodicDecayParams {
    fn default() -> Self {
        PeriodicDecayParams { lattice: None, fraction: default_fraction(), xi_bound: default_xi_bound() }
    }
}

fn default_fraction() -> f64 {
    0.1
}

fn default_xi_bound() -> i64 {
    20
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SandwichParams {
    #[serde(default)]
    pub lattice: Option<LatticeSpec>,
    pub r: f64,
}

impl Default for SandwichParams {
    fn default() -> Self {
        SandwichParams { lattice: None, r: 4.0 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Example1Params {
    pub n_blocks: u32,
    pub t_max: f64,
    #[serde(default = "default_threshold")]
    pub threshold: f64,
}

impl Default for Example1Params {
    fn default() -> Self {
        Example1Params { n_blocks: 3, t_max: 2.0, threshold: default_threshold() }
    }
}

fn default_threshold() -> f64 {
    1.0
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExtremalParams {
    /// Far-field levels, strictly decreasing above the data or strictly
    /// increasing below them.
    pub levels: Vec<f64>,
    pub radii: Vec<f64>,
    pub inner: f64,
}
