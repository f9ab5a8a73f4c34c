//! Run configuration document.
//!
//! One JSON object with optional per-command sections, for example
//!
//! ```json
//! {
//!   "seed": 42,
//!   "persist": { "law": {"type": "uniform", "a": 0.4, "b": 0.8}, "n_paths": 1000000 },
//!   "verify": { "n_paths": 100000 }
//! }
//! ```
//!
//! Command-line flags override document fields.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hurst_law::HurstLaw;
use crate::persistence::GridRule;

fn default_law() -> HurstLaw {
    HurstLaw::point(0.5)
}

fn default_horizons() -> Vec<f64> {
    (4..=10).map(|k| 2f64.powi(k)).collect()
}

fn default_epsilons() -> Vec<f64> {
    (1..=6).map(|k| 2f64.powi(-k)).collect()
}

fn default_n_paths() -> u64 {
    100_000
}

fn default_barrier() -> f64 {
    1.0
}

fn default_ci_level() -> f64 {
    0.95
}

fn default_min_expected_hits() -> f64 {
    50.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PersistSection {
    #[serde(default = "default_law")]
    pub law: HurstLaw,
    #[serde(default = "default_horizons")]
    pub horizons: Vec<f64>,
    #[serde(default = "default_n_paths")]
    pub n_paths: u64,
    #[serde(default)]
    pub grid_rule: GridRule,
    #[serde(default = "default_barrier")]
    pub barrier: f64,
    #[serde(default = "default_ci_level")]
    pub ci_level: f64,
    /// Smallest expected hit count, from a pilot run, at the last horizon.
    #[serde(default = "default_min_expected_hits")]
    pub min_expected_hits: f64,
}

impl Default for PersistSection {
    fn default() -> Self {
        serde_json::from_str("{}").expect("defaults deserialize")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SmallBarrierSection {
    #[serde(default = "default_law")]
    pub law: HurstLaw,
    #[serde(default = "default_epsilons")]
    pub epsilons: Vec<f64>,
    #[serde(default = "default_n_paths")]
    pub n_paths: u64,
    #[serde(default)]
    pub grid_rule: GridRule,
    #[serde(default = "default_ci_level")]
    pub ci_level: f64,
    #[serde(default = "default_min_expected_hits")]
    pub min_expected_hits: f64,
}

impl Default for SmallBarrierSection {
    fn default() -> Self {
        serde_json::from_str("{}").expect("defaults deserialize")
    }
}

fn default_expectation_grid() -> u32 {
    1024
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifySection {
    #[serde(default = "default_n_paths")]
    pub n_paths: u64,
    #[serde(default = "default_expectation_grid")]
    pub expectation_grid: u32,
    #[serde(default)]
    pub checks: Vec<String>,
}

impl Default for VerifySection {
    fn default() -> Self {
        serde_json::from_str("{}").expect("defaults deserialize")
    }
}

fn default_bench_hursts() -> Vec<f64> {
    vec![0.5, 0.7]
}

fn default_bench_sizes() -> Vec<usize> {
    vec![8, 64, 512, 4096, 16384]
}

fn default_bench_paths() -> u64 {
    64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchSection {
    #[serde(default = "default_bench_hursts")]
    pub hursts: Vec<f64>,
    /// Numbers of grid steps on `[0, 1]`.
    #[serde(default = "default_bench_sizes")]
    pub sizes: Vec<usize>,
    #[serde(default = "default_bench_paths")]
    pub paths: u64,
}

impl Default for BenchSection {
    fn default() -> Self {
        serde_json::from_str("{}").expect("defaults deserialize")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SamplerKind {
    Circulant,
    Cholesky,
}

fn default_sim_hurst() -> f64 {
    0.7
}

fn default_sim_horizon() -> f64 {
    1.0
}

fn default_sim_m() -> u32 {
    64
}

fn default_sim_paths() -> u64 {
    10
}

fn default_sampler() -> SamplerKind {
    SamplerKind::Circulant
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateSection {
    #[serde(default = "default_sim_hurst")]
    pub hurst: f64,
    #[serde(default = "default_sim_horizon")]
    pub horizon: f64,
    #[serde(default = "default_sim_m")]
    pub m: u32,
    #[serde(default = "default_sim_paths")]
    pub n_paths: u64,
    #[serde(default = "default_sampler")]
    pub sampler: SamplerKind,
}

impl Default for SimulateSection {
    fn default() -> Self {
        serde_json::from_str("{}").expect("defaults deserialize")
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub workers: Option<usize>,
    #[serde(default)]
    pub out_dir: Option<PathBuf>,
    #[serde(default)]
    pub persist: Option<PersistSection>,
    #[serde(default)]
    pub small_barrier: Option<SmallBarrierSection>,
    #[serde(default)]
    pub verify: Option<VerifySection>,
    #[serde(default)]
    pub bench: Option<BenchSection>,
    #[serde(default)]
    pub simulate: Option<SimulateSection>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidConfig(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| Error::InvalidConfig(format!("config {}: {e}", path.display())))
    }

    /// The master seed; there is no entropy fallback.
    pub fn require_seed(&self) -> Result<u64> {
        self.seed
            .ok_or_else(|| Error::InvalidConfig("a seed is required (--seed or \"seed\" in the config)".into()))
    }
}

pub(crate) fn check_grid(name: &str, xs: &[f64]) -> Result<()> {
    if xs.is_empty() {
        return Err(Error::InvalidConfig(format!("{name} grid is empty")));
    }
    Ok(())
}
