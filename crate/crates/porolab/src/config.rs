//! Experiment configuration as read from JSON.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use porolab_core::checks::geometric_radii;
use porolab_core::spaces::SpaceSpec;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, LabResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScaleSpec {
    pub r_min: f64,
    pub r_max: f64,
    pub count: usize,
    #[serde(default = "yes")]
    pub geometric: bool,
}

fn yes() -> bool {
    true
}

impl ScaleSpec {
    pub fn geometric(r_min: f64, r_max: f64, count: usize) -> Self {
        ScaleSpec { r_min, r_max, count, geometric: true }
    }

    pub fn validate(&self) -> LabResult<()> {
        if !(self.r_min > 0.0 && self.r_min < self.r_max && self.r_max.is_finite()) {
            return Err(LabError::Config(format!("need 0 < r_min < r_max, got {} and {}", self.r_min, self.r_max)));
        }
        if self.count == 0 {
            return Err(LabError::Config("scale count must be positive".into()));
        }
        Ok(())
    }

    /// Scales from `r_max` down to `r_min`.
    pub fn values(&self) -> Vec<f64> {
        if !self.geometric && self.count > 1 {
            let h = (self.r_max - self.r_min) / (self.count - 1) as f64;
            return (0..self.count).map(|i| self.r_max - h * i as f64).collect();
        }
        geometric_radii(self.r_min, self.r_max, self.count)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Overrides {
    /// Ball-covering constant behind the decay exponent. Left
    /// unset, every exponent that depends on it is reported as symbolic.
    pub c_b: Option<f64>,
    /// Multiplier applied to the measured porosity before building an envelope.
    pub rho_prime_factor: Option<f64>,
    /// Named tolerances; each experiment documents the keys it reads.
    pub tolerances: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSpec {
    pub dir: Option<PathBuf>,
    pub json: bool,
    pub csv: bool,
}

impl Default for OutputSpec {
    fn default() -> Self {
        OutputSpec { dir: None, json: true, csv: true }
    }
}

/// Every field is optional; experiments fill gaps with their defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Option<String>,
    pub space: Option<SpaceSpec>,
    pub scales: Option<ScaleSpec>,
    pub sample_size: Option<usize>,
    pub seed: u64,
    pub resolution: Option<f64>,
    pub overrides: Overrides,
    pub output: OutputSpec,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> LabResult<Self> {
        serde_json::from_str(text).map_err(|e| LabError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> LabResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| LabError::io(path, e))?;
        Self::from_json(&text).map_err(|e| LabError::Config(format!("{}: {e}", path.display())))
    }

    pub fn validate(&self) -> LabResult<()> {
        if let Some(s) = &self.scales {
            s.validate()?;
        }
        if self.sample_size == Some(0) {
            return Err(LabError::Config("sample_size must be positive".into()));
        }
        if let Some(r) = self.resolution {
            if !(r > 0.0 && r < 1.0) {
                return Err(LabError::Config("resolution is a fraction of the scale in (0, 1)".into()));
            }
        }
        if let Some(cb) = self.overrides.c_b {
            if cb.is_nan() || cb <= 0.0 {
                return Err(LabError::Config("c_b must be positive".into()));
            }
        }
        if let Some(f) = self.overrides.rho_prime_factor {
            if !(f > 0.0 && f <= 1.0) {
                return Err(LabError::Config("rho_prime_factor must lie in (0, 1]".into()));
            }
        }
        Ok(())
    }

    pub fn scales_or(&self, default: ScaleSpec) -> Vec<f64> {
        self.scales.clone().unwrap_or(default).values()
    }

    /// Scales for slope fits, which need at least five points.
    pub fn fit_scales_or(&self, default: ScaleSpec) -> LabResult<Vec<f64>> {
        let s = self.scales.clone().unwrap_or(default);
        if s.count < 5 {
            return Err(LabError::Config("dimension experiments need at least 5 scales".into()));
        }
        Ok(s.values())
    }

    pub fn sample_or(&self, default: usize) -> usize {
        self.sample_size.unwrap_or(default)
    }

    pub fn resolution_or(&self, default: f64) -> f64 {
        self.resolution.unwrap_or(default)
    }

    pub fn tolerance_or(&self, key: &str, default: f64) -> f64 {
        self.overrides.tolerances.get(key).copied().unwrap_or(default)
    }
}
