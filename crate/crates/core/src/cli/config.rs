//! Run configuration: one TOML file with flat keys plus a `[triple]` table.
//!
//! ```toml
//! seed = 7
//! horizon = 1.0
//! n_samples = 10000
//! n_paths = 2000
//! n_list = [1, 2, 4, 8]
//! u_grid = [0.5, 1.0, 2.0]
//! z_grid = [0.1, 0.5, 0.9]
//!
//! [triple]
//! family = "gamma"
//! shape_rate = 1.0
//! scale_rate = 1.0
//! ```

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::levy::{LevyTriple, TripleDocument};
use crate::samplers::{SubordinatorSampler, DEFAULT_GRID_CELLS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

fn default_horizon() -> f64 {
    1.0
}
fn default_n_samples() -> usize {
    10_000
}
fn default_n_paths() -> usize {
    2_000
}
fn default_n_list() -> Vec<u64> {
    vec![1, 2, 4, 8, 16, 32, 64]
}
fn default_qn_list() -> Vec<u64> {
    vec![1, 4, 16, 64]
}
fn default_u_grid() -> Vec<f64> {
    vec![0.5, 1.0, 2.0]
}
fn default_z_grid() -> Vec<f64> {
    (1..=9).map(|i| i as f64 / 10.0).collect()
}
fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}
fn default_format() -> Format {
    Format::Json
}
fn default_psi_scale() -> f64 {
    1.0
}
fn default_simulate_paths() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_horizon")]
    pub horizon: f64,
    /// Grid of `S` and of the subordinated Poisson process; defaults to
    /// `horizon / 4096`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid_step: Option<f64>,
    /// Replicas for Monte Carlo means (`laplace`, `q_n`, killing).
    #[serde(default = "default_n_samples")]
    pub n_samples: usize,
    /// Subordinated paths for `convergence`, `jumps` and the law tests.
    #[serde(default = "default_n_paths")]
    pub n_paths: usize,
    /// Discretization levels.
    #[serde(default = "default_n_list")]
    pub n_list: Vec<u64>,
    /// Levels for the `q_n` check.
    #[serde(default = "default_qn_list")]
    pub qn_list: Vec<u64>,
    #[serde(default = "default_u_grid")]
    pub u_grid: Vec<f64>,
    #[serde(default = "default_z_grid")]
    pub z_grid: Vec<f64>,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default = "default_format")]
    pub format: Format,
    /// Small-jump cutoff; forces the truncated sampler when set.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truncation: Option<f64>,
    #[serde(default)]
    pub compensate_small_jumps: bool,
    /// Factor applied to `Ψ` in the Laplace reference; anything but 1 is a
    /// deliberately wrong model.
    #[serde(default = "default_psi_scale")]
    pub psi_scale: f64,
    /// Paths written by `simulate`.
    #[serde(default = "default_simulate_paths")]
    pub simulate_paths: usize,
    pub triple: TripleDocument,
}

fn config_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Config(msg.into()))
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return config_err(format!("horizon must be positive, got {}", self.horizon));
        }
        if let Some(h) = self.grid_step {
            if !(h > 0.0 && h <= self.horizon) {
                return config_err(format!("grid_step must be in (0, horizon], got {h}"));
            }
        }
        if self.n_samples == 0 || self.n_paths == 0 {
            return config_err("n_samples and n_paths must be positive");
        }
        for (name, list) in [("n_list", &self.n_list), ("qn_list", &self.qn_list)] {
            if list.is_empty() || list[0] == 0 || list.windows(2).any(|w| w[1] <= w[0]) {
                return config_err(format!("{name} must be positive and strictly increasing"));
            }
        }
        if self.u_grid.iter().any(|u| !(*u >= 0.0 && u.is_finite())) {
            return config_err("u_grid entries must be finite and >= 0");
        }
        if self.z_grid.is_empty() || self.z_grid.iter().any(|z| !(0.0..=1.0).contains(z)) {
            return config_err("z_grid must be a nonempty subset of [0, 1]");
        }
        if !(self.psi_scale > 0.0 && self.psi_scale.is_finite()) {
            return config_err("psi_scale must be positive");
        }
        if let Some(eps) = self.truncation {
            if !(eps > 0.0) {
                return config_err("truncation must be positive");
            }
        }
        self.levy_triple()?;
        Ok(())
    }

    pub fn levy_triple(&self) -> Result<LevyTriple> {
        LevyTriple::try_from(&self.triple).map_err(|e| match e {
            Error::Config(m) => Error::Config(m),
            other => Error::Config(format!("triple: {other}")),
        })
    }

    pub fn sampler(&self) -> Result<SubordinatorSampler> {
        let triple = self.levy_triple()?;
        match self.truncation {
            Some(eps) => SubordinatorSampler::truncated(triple, eps, self.compensate_small_jumps),
            None => SubordinatorSampler::for_triple(triple),
        }
    }

    pub fn grid_step(&self) -> f64 {
        self.grid_step.unwrap_or(self.horizon / DEFAULT_GRID_CELLS as f64)
    }

    /// SHA-256 of the canonical TOML form, ignoring where and how output is
    /// written.
    pub fn hash(&self) -> Result<String> {
        let mut canonical = self.clone();
        canonical.output_dir = PathBuf::new();
        canonical.format = Format::Json;
        let text = canonical.to_toml_string()?;
        Ok(hex::encode(Sha256::digest(text.as_bytes())))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const GAMMA: &str = "seed = 3\nhorizon = 2.0\n[triple]\nfamily = \"gamma\"\nshape_rate = 1.0\nscale_rate = 1.0\n";

    #[test]
    fn defaults_and_round_trip() {
        let cfg = RunConfig::from_toml_str(GAMMA).unwrap();
        assert_eq!(cfg.n_samples, 10_000);
        assert_eq!(cfg.grid_step(), 2.0 / 4096.0);
        let back = RunConfig::from_toml_str(&cfg.to_toml_string().unwrap()).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn hash_ignores_output_location() {
        let a = RunConfig::from_toml_str(GAMMA).unwrap();
        let mut b = a.clone();
        b.output_dir = "elsewhere".into();
        b.format = Format::Csv;
        assert_eq!(a.hash().unwrap(), b.hash().unwrap());
        b.seed = 4;
        assert_ne!(a.hash().unwrap(), b.hash().unwrap());
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(RunConfig::from_toml_str(""), Err(Error::Config(_))));
        let unknown = GAMMA.replace("family = \"gamma\"", "family = \"weibull\"");
        assert!(matches!(RunConfig::from_toml_str(&unknown), Err(Error::Config(_))));
        let extra = format!("bogus = 1\n{GAMMA}");
        assert!(RunConfig::from_toml_str(&extra).is_err());
        let unsorted = format!("n_list = [4, 2]\n{GAMMA}");
        assert!(RunConfig::from_toml_str(&unsorted).is_err());
    }
}
