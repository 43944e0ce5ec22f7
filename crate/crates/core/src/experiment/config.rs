use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::analysis::CheckKind;
use crate::error::{Error, Result};
use crate::solvers::SolverTag;
use crate::spaces::SpaceParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RegularityMode {
    /// Closed-form constants when known, otherwise estimate.
    #[default]
    Auto,
    /// Always estimate `C` and `D` by sampling.
    Estimate,
}

/// How the regularity constants are obtained.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RegularityPolicy {
    pub mode: RegularityMode,
    pub c_lower: Option<f64>,
    pub d_upper: Option<f64>,
    pub n_probe: usize,
    pub n_radii: usize,
}

impl Default for RegularityPolicy {
    fn default() -> Self {
        Self {
            mode: RegularityMode::Auto,
            c_lower: None,
            d_upper: None,
            n_probe: 20_000,
            n_radii: 8,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputPaths {
    pub csv: Option<PathBuf>,
    pub json: Option<PathBuf>,
}

fn default_solvers() -> Vec<SolverTag> {
    vec![SolverTag::NearestNeighbor, SolverTag::Greedy]
}

fn default_trials() -> usize {
    1
}

/// A scaling experiment as read from TOML.
///
/// ```toml
/// n_grid = [128, 256, 512]
/// trials_per_n = 20
/// master_seed = 7
/// solvers = ["nn", "greedy"]
///
/// [space]
/// kind = "gasket"
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub space: SpaceParams,
    #[serde(default = "default_solvers")]
    pub solvers: Vec<SolverTag>,
    pub n_grid: Vec<usize>,
    #[serde(default = "default_trials")]
    pub trials_per_n: usize,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default)]
    pub checks: Vec<CheckKind>,
    #[serde(default)]
    pub output: OutputPaths,
    #[serde(default)]
    pub regularity: RegularityPolicy,
    /// Start vertex for nearest neighbor and the 2-opt seed tour.
    #[serde(default)]
    pub nn_start: usize,
}

impl ExperimentConfig {
    pub fn new(space: SpaceParams, n_grid: Vec<usize>, trials_per_n: usize, master_seed: u64) -> Self {
        Self {
            space,
            solvers: default_solvers(),
            n_grid,
            trials_per_n,
            master_seed,
            checks: Vec::new(),
            output: OutputPaths::default(),
            regularity: RegularityPolicy::default(),
            nn_start: 0,
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("experiment config is always representable")
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_grid.is_empty() {
            return Err(Error::Config("n_grid must not be empty".into()));
        }
        if self.n_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config(format!(
                "n_grid must be strictly increasing, got {:?}",
                self.n_grid
            )));
        }
        if self.n_grid[0] < 2 {
            return Err(Error::Config("n_grid entries must be at least 2".into()));
        }
        if self.trials_per_n == 0 {
            return Err(Error::Config("trials_per_n must be at least 1".into()));
        }
        if self.solvers.is_empty() {
            return Err(Error::Config("solvers must not be empty".into()));
        }
        if self.nn_start >= self.n_grid[0] {
            return Err(Error::Config(format!(
                "nn_start {} is out of range for n = {}",
                self.nn_start, self.n_grid[0]
            )));
        }
        let p = &self.regularity;
        if p.n_radii < 2 {
            return Err(Error::Config("regularity.n_radii must be at least 2".into()));
        }
        Ok(())
    }
}
