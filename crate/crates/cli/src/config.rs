use std::path::Path;

use serde::{Deserialize, Serialize};
use univalent::acceptance::DEFAULT_SEED;
use univalent::norms::NormOptions;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridConfig {
    pub n_radial: usize,
    pub n_angular: usize,
    pub r_max: f64,
}

impl Default for GridConfig {
    fn default() -> Self {
        let d = NormOptions::default();
        Self { n_radial: d.n_radial, n_angular: d.n_angular, r_max: d.r_max }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CliConfig {
    pub truncation_order: usize,
    pub grid: GridConfig,
    pub solver_tol: f64,
    pub seed: u64,
    pub output_path: Option<String>,
}

impl Default for CliConfig {
    fn default() -> Self {
        Self { truncation_order: 256, grid: GridConfig::default(), solver_tol: 1e-12, seed: DEFAULT_SEED, output_path: None }
    }
}

impl CliConfig {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
    }

    pub fn validate(&self) -> Result<(), String> {
        if !(self.solver_tol > 0.0) {
            return Err(format!("solver_tol = {} must be positive", self.solver_tol));
        }
        if !(self.grid.r_max > 0.0 && self.grid.r_max < 1.0) {
            return Err(format!("grid.r_max = {} must lie in (0, 1)", self.grid.r_max));
        }
        if self.grid.n_radial == 0 || self.grid.n_angular == 0 {
            return Err("grid sizes must be positive".into());
        }
        if self.truncation_order == 0 {
            return Err("truncation_order must be positive".into());
        }
        Ok(())
    }

    pub fn norm_options(&self) -> NormOptions {
        NormOptions {
            n_radial: self.grid.n_radial,
            n_angular: self.grid.n_angular,
            r_max: self.grid.r_max,
            ..NormOptions::default()
        }
    }
}
