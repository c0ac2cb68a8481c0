//! Scenario manifests: TOML key-value files describing a run, with CLI
//! flags taking precedence over file values and the `QLATTICE_SEED`
//! environment variable as the seed fallback.

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("cannot parse {path}: {source}")]
    Parse {
        path: String,
        source: toml::de::Error,
    },
    #[error("unknown mode {0:?} (expected \"trained\" or \"full\")")]
    UnknownMode(String),
}

/// Whether interference runs use the stationary-register shortcut or the
/// full lattice mechanism.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RunMode {
    #[default]
    Trained,
    Full,
}

impl RunMode {
    pub fn parse(text: &str) -> Result<RunMode, ScenarioError> {
        match text {
            "trained" => Ok(RunMode::Trained),
            "full" => Ok(RunMode::Full),
            other => Err(ScenarioError::UnknownMode(other.to_string())),
        }
    }
}

/// A scenario manifest; every field optional so CLI flags can fill gaps.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub scenario: Option<String>,
    pub np: Option<u64>,
    pub nt: Option<u64>,
    pub seed: Option<u64>,
    pub p: Option<f64>,
    pub delta: Option<u64>,
    pub p1: Option<f64>,
    pub sources: Option<Vec<i64>>,
    pub probs: Option<Vec<f64>>,
    pub ell: Option<u64>,
    pub mode: Option<String>,
    pub emission_gap: Option<u64>,
    /// Total-variation pass threshold used by `--compare`.
    pub tv_threshold: Option<f64>,
    /// Chi-square rejection level used by `--compare`.
    pub chi_square_alpha: Option<f64>,
}

impl ScenarioFile {
    pub fn load(path: &Path) -> Result<Self, ScenarioError> {
        let text = std::fs::read_to_string(path).map_err(|source| ScenarioError::Io {
            path: path.display().to_string(),
            source,
        })?;
        toml::from_str(&text).map_err(|source| ScenarioError::Parse {
            path: path.display().to_string(),
            source,
        })
    }
}

/// Resolves a seed: explicit flag, then scenario file, then the
/// `QLATTICE_SEED` environment variable, then zero.
pub fn resolve_seed(flag: Option<u64>, file: Option<u64>) -> u64 {
    flag.or(file)
        .or_else(|| {
            std::env::var("QLATTICE_SEED")
                .ok()
                .and_then(|s| s.parse().ok())
        })
        .unwrap_or(0)
}
