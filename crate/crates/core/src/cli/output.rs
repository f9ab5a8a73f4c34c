//! Data files and the run manifest.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::Result;
use crate::estimate::McEstimate;
use crate::fit::ExponentFit;

/// Columns of estimate tables.
pub const ESTIMATE_COLUMNS: [&str; 11] = [
    "quantity", "H_or_law", "T_or_eps", "m", "n_paths", "n_hits", "p_hat", "std_err", "ci_lo", "ci_hi", "seed",
];

/// Columns of fit tables.
pub const FIT_COLUMNS: [&str; 10] = [
    "quantity",
    "H_or_law",
    "slope",
    "slope_se",
    "intercept",
    "r_squared",
    "n_points",
    "predicted",
    "discrepancy",
    "seed",
];

pub struct EstimateRow<'a> {
    pub quantity: &'a str,
    pub law: &'a str,
    pub x: f64,
    pub m: &'a str,
    pub estimate: &'a McEstimate,
    pub seed: u64,
}

pub fn write_estimates(path: &Path, rows: &[EstimateRow<'_>]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(ESTIMATE_COLUMNS)?;
    for r in rows {
        let e = r.estimate;
        let hits = e.n_hits.map(|h| h.to_string()).unwrap_or_default();
        w.write_record([
            r.quantity.to_string(),
            r.law.to_string(),
            r.x.to_string(),
            r.m.to_string(),
            e.n_paths.to_string(),
            hits,
            e.p_hat.to_string(),
            e.std_err.to_string(),
            e.ci_lo.to_string(),
            e.ci_hi.to_string(),
            r.seed.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// `predicted` is the predicted slope (negative for decaying persistence);
/// `discrepancy` is `|slope − predicted|`.
pub fn write_fit(path: &Path, quantity: &str, law: &str, fit: &ExponentFit, predicted: f64, seed: u64) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(FIT_COLUMNS)?;
    w.write_record([
        quantity.to_string(),
        law.to_string(),
        fit.slope.to_string(),
        fit.slope_se.to_string(),
        fit.intercept.to_string(),
        fit.r_squared.to_string(),
        fit.n_points.to_string(),
        predicted.to_string(),
        (fit.slope - predicted).abs().to_string(),
        seed.to_string(),
    ])?;
    w.flush()?;
    Ok(())
}

pub fn sha256_file(path: &Path) -> Result<String> {
    Ok(hex::encode(Sha256::digest(fs::read(path)?)))
}

#[derive(Debug, Clone, Serialize)]
pub struct Stage {
    pub name: String,
    pub wall_time_s: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct OutputDigest {
    pub file: String,
    pub sha256: String,
}

/// Manifest written next to the data files of one command.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub config: Value,
    pub stages: Vec<Stage>,
    pub outputs: Vec<OutputDigest>,
}

impl RunManifest {
    pub fn new(command: &str, config: Value) -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command: command.to_string(),
            config,
            stages: Vec::new(),
            outputs: Vec::new(),
        }
    }

    /// Runs `f` and records its wall time under `name`.
    pub fn stage<T>(&mut self, name: &str, f: impl FnOnce() -> Result<T>) -> Result<T> {
        let t = Instant::now();
        let out = f()?;
        self.stages.push(Stage {
            name: name.to_string(),
            wall_time_s: t.elapsed().as_secs_f64(),
        });
        Ok(out)
    }

    pub fn add_output(&mut self, path: &Path) -> Result<()> {
        let file = path
            .file_name()
            .map(|f| f.to_string_lossy().into_owned())
            .unwrap_or_default();
        self.outputs.push(OutputDigest {
            file,
            sha256: sha256_file(path)?,
        });
        Ok(())
    }

    pub fn write(&self, dir: &Path) -> Result<PathBuf> {
        let path = dir.join("manifest.json");
        fs::write(&path, serde_json::to_string_pretty(self)?)?;
        Ok(path)
    }
}
