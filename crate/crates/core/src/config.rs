//! JSON run configurations, one per command. Unknown fields are rejected.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::analysis::scan::{FamilyConfig, ScanValues};
use crate::error::{Error, Result};
use crate::potential::PotentialConfig;

pub const DEFAULT_POINTS: usize = 2000;

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    #[serde(rename = "L", default, skip_serializing_if = "Option::is_none")]
    pub half_width: Option<f64>,
    #[serde(rename = "N", default, skip_serializing_if = "Option::is_none")]
    pub n_points: Option<usize>,
}

/// `potential`, `solve` and `nodal`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    pub potential: PotentialConfig,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub levels: Option<usize>,
    /// Richardson error bound for `solve`; omitted means a single grid.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    /// Dominance threshold for `nodal`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,
}

/// `scan-alc` and `scan-reloc`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanConfig {
    pub family: FamilyConfig,
    pub values: ScanValues,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub levels: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SexticConfig {
    pub alphas: Vec<f64>,
    pub grid: GridConfig,
    pub levels: usize,
    pub tolerance: f64,
}

impl Default for SexticConfig {
    fn default() -> Self {
        Self {
            alphas: vec![-3.0, -2.0, -1.0, 0.0, 1.0, 2.0, 3.0],
            grid: GridConfig { half_width: Some(4.0), n_points: Some(4000) },
            levels: 1,
            tolerance: 1e-5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RectConfig {
    pub a2: f64,
    pub b2: f64,
    pub c2: f64,
    pub levels: usize,
    pub p_max: usize,
    pub q_max: usize,
    /// Wavefunction samples across the box.
    pub samples: usize,
}

impl Default for RectConfig {
    fn default() -> Self {
        Self { a2: 0.0, b2: 400.0, c2: 0.0, levels: 4, p_max: 3, q_max: 3, samples: 601 }
    }
}

pub fn parse<T: DeserializeOwned>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::InvalidArgument(format!("config: {e}")))
}

pub fn load<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidArgument(format!("cannot read {}: {e}", path.display())))?;
    parse(&text)
}
