//! Subcommand implementations.

use std::path::Path;

use serde_json::json;

use super::config::{check_grid, PersistSection, SamplerKind, SimulateSection, SmallBarrierSection, VerifySection};
use super::output::{write_estimates, write_fit, EstimateRow, RunManifest};
use crate::checks::{run_verify, VerifyConfig, VerifyReport};
use crate::error::{Error, Result};
use crate::estimate::McEstimate;
use crate::fit::{fit_exponent, fit_points, predicted_exponent, ExponentFit, ExponentKind};
use crate::hurst_law::HurstLaw;
use crate::paths::{sample_path, CholeskySampler, GridSpec};
use crate::persistence::{
    estimate_persistence_curve, estimate_small_barrier_curve, grid_points_per_unit, GridRule, McConfig,
};
use crate::rng::{derive_seed, stream, Domain};

/// Result of an estimate-and-fit command.
#[derive(Debug, Clone)]
pub struct CurveOutcome {
    pub xs: Vec<f64>,
    pub estimates: Vec<McEstimate>,
    pub fit: Option<ExponentFit>,
    /// Predicted decay exponent (positive).
    pub predicted: f64,
}

fn m_label(law: &HurstLaw, rule: GridRule) -> String {
    match law.as_point() {
        Some(h) => grid_points_per_unit(h, rule).to_string(),
        None => rule.label(),
    }
}

fn pilot_paths(n_paths: u64) -> u64 {
    n_paths.min((n_paths / 20).max(1000))
}

/// Refuses runs whose pilot predicts fewer than `min_hits` hits at the
/// rarest point.
fn require_hits(pilot: &McEstimate, n_paths: u64, min_hits: f64, what: &str) -> Result<()> {
    let expected = pilot.p_hat * n_paths as f64;
    if expected < min_hits {
        return Err(Error::InvalidConfig(format!(
            "pilot run predicts {expected:.1} hits at {what} with {n_paths} paths (need {min_hits}); \
             lower the horizon / raise epsilon or raise n_paths"
        )));
    }
    Ok(())
}

fn fit_curve(xs: &[f64], ests: &[McEstimate]) -> Result<Option<ExponentFit>> {
    let pts = fit_points(xs, ests);
    if pts.len() < 3 {
        log::warn!("only {} usable points; no exponent fit", pts.len());
        return Ok(None);
    }
    fit_exponent(&pts).map(Some)
}

pub fn cmd_persist(sec: &PersistSection, seed: u64, workers: usize, out: &Path) -> Result<CurveOutcome> {
    sec.law.validate()?;
    check_grid("horizon", &sec.horizons)?;
    let cfg = McConfig {
        n_paths: sec.n_paths,
        seed,
        grid_rule: sec.grid_rule,
        barrier: sec.barrier,
        ci_level: sec.ci_level,
        workers,
    };
    cfg.validate()?;
    std::fs::create_dir_all(out)?;
    let mut manifest = RunManifest::new("persist", json!({"section": sec, "seed": seed, "workers": workers}));
    let t_max = sec.horizons.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    manifest.stage("pilot", || {
        let pilot_cfg = McConfig {
            n_paths: pilot_paths(sec.n_paths),
            seed: derive_seed(seed, "pilot"),
            ..cfg
        };
        let pilot = estimate_persistence_curve(&sec.law, &[t_max], &pilot_cfg)?[0];
        require_hits(&pilot, sec.n_paths, sec.min_expected_hits, &format!("T={t_max}"))
    })?;
    let estimates = manifest.stage("estimate", || estimate_persistence_curve(&sec.law, &sec.horizons, &cfg))?;
    let fit = manifest.stage("fit", || fit_curve(&sec.horizons, &estimates))?;
    let kind = match sec.law.as_point() {
        Some(h) => ExponentKind::FixedH { h },
        None => ExponentKind::Annealed { law: sec.law.clone() },
    };
    let predicted = predicted_exponent(&kind);
    let quantity = if sec.law.as_point().is_some() {
        "persistence_fixed"
    } else {
        "persistence_annealed"
    };
    let label = sec.law.label();
    let m = m_label(&sec.law, sec.grid_rule);
    let data = out.join("persist.csv");
    let fit_path = out.join("persist_fit.csv");
    manifest.stage("write", || {
        let rows: Vec<EstimateRow> = sec
            .horizons
            .iter()
            .zip(&estimates)
            .map(|(&x, e)| EstimateRow {
                quantity,
                law: &label,
                x,
                m: &m,
                estimate: e,
                seed,
            })
            .collect();
        write_estimates(&data, &rows)?;
        if let Some(f) = &fit {
            write_fit(&fit_path, quantity, &label, f, -predicted, seed)?;
        }
        Ok(())
    })?;
    manifest.add_output(&data)?;
    if fit.is_some() {
        manifest.add_output(&fit_path)?;
    }
    manifest.write(out)?;
    if let Some(f) = &fit {
        println!(
            "persist {label}: slope {:.4} ± {:.4} (R² {:.4}); predicted slope {:.4}",
            f.slope, f.slope_se, f.r_squared, -predicted
        );
    }
    Ok(CurveOutcome {
        xs: sec.horizons.clone(),
        estimates,
        fit,
        predicted,
    })
}

pub fn cmd_small_barrier(sec: &SmallBarrierSection, seed: u64, workers: usize, out: &Path) -> Result<CurveOutcome> {
    sec.law.validate()?;
    check_grid("epsilon", &sec.epsilons)?;
    let cfg = McConfig {
        n_paths: sec.n_paths,
        seed,
        grid_rule: sec.grid_rule,
        barrier: 1.0,
        ci_level: sec.ci_level,
        workers,
    };
    cfg.validate()?;
    std::fs::create_dir_all(out)?;
    let mut manifest = RunManifest::new(
        "small-barrier",
        json!({"section": sec, "seed": seed, "workers": workers}),
    );
    let eps_min = sec.epsilons.iter().cloned().fold(f64::INFINITY, f64::min);
    manifest.stage("pilot", || {
        let pilot_cfg = McConfig {
            n_paths: pilot_paths(sec.n_paths),
            seed: derive_seed(seed, "pilot"),
            ..cfg
        };
        let pilot = estimate_small_barrier_curve(&sec.law, &[eps_min], &pilot_cfg)?[0];
        require_hits(&pilot, sec.n_paths, sec.min_expected_hits, &format!("eps={eps_min}"))
    })?;
    let estimates = manifest.stage("estimate", || {
        estimate_small_barrier_curve(&sec.law, &sec.epsilons, &cfg)
    })?;
    let fit = manifest.stage("fit", || fit_curve(&sec.epsilons, &estimates))?;
    let predicted = predicted_exponent(&ExponentKind::SmallBarrier { law: sec.law.clone() });
    let label = sec.law.label();
    let m = m_label(&sec.law, sec.grid_rule);
    let data = out.join("small_barrier.csv");
    let fit_path = out.join("small_barrier_fit.csv");
    manifest.stage("write", || {
        let rows: Vec<EstimateRow> = sec
            .epsilons
            .iter()
            .zip(&estimates)
            .map(|(&x, e)| EstimateRow {
                quantity: "small_barrier",
                law: &label,
                x,
                m: &m,
                estimate: e,
                seed,
            })
            .collect();
        write_estimates(&data, &rows)?;
        if let Some(f) = &fit {
            write_fit(&fit_path, "small_barrier", &label, f, predicted, seed)?;
        }
        Ok(())
    })?;
    manifest.add_output(&data)?;
    if fit.is_some() {
        manifest.add_output(&fit_path)?;
    }
    manifest.write(out)?;
    if let Some(f) = &fit {
        println!(
            "small-barrier {label}: slope {:.4} ± {:.4} (R² {:.4}); predicted slope {:.4}",
            f.slope, f.slope_se, f.r_squared, predicted
        );
    }
    Ok(CurveOutcome {
        xs: sec.epsilons.clone(),
        estimates,
        fit,
        predicted,
    })
}

pub fn cmd_verify(
    sec: &VerifySection,
    checks: &[String],
    seed: u64,
    workers: usize,
    out: &Path,
) -> Result<VerifyReport> {
    let cfg = VerifyConfig {
        seed,
        n_paths: sec.n_paths,
        expectation_grid: sec.expectation_grid,
        workers,
    };
    if cfg.n_paths < 100 {
        return Err(Error::InvalidConfig(format!(
            "verify n_paths must be >= 100, got {}",
            cfg.n_paths
        )));
    }
    let filter: &[String] = if checks.is_empty() { &sec.checks } else { checks };
    std::fs::create_dir_all(out)?;
    let mut manifest = RunManifest::new(
        "verify",
        json!({"section": sec, "checks": filter, "seed": seed, "workers": workers}),
    );
    let report = manifest.stage("checks", || run_verify(&cfg, Some(filter)))?;
    let path = out.join("verify.json");
    manifest.stage("write", || {
        std::fs::write(&path, serde_json::to_string_pretty(&report)?)?;
        Ok(())
    })?;
    manifest.add_output(&path)?;
    manifest.write(out)?;
    for e in &report.entries {
        println!(
            "{:<5} {:<18} {:<48} margin {:+.4e}",
            if e.pass { "PASS" } else { "FAIL" },
            e.group,
            e.name,
            e.margin
        );
    }
    for f in &report.findings {
        println!("FINDING {f}");
    }
    println!("all_passed: {}", report.all_passed);
    Ok(report)
}

pub fn cmd_simulate(sec: &SimulateSection, seed: u64, out: &Path) -> Result<std::path::PathBuf> {
    if !(sec.hurst > 0.0 && sec.hurst <= 1.0) {
        return Err(Error::InvalidConfig(format!(
            "simulate hurst must be in (0,1], got {}",
            sec.hurst
        )));
    }
    if sec.n_paths == 0 {
        return Err(Error::InvalidConfig("simulate needs n_paths >= 1".into()));
    }
    let grid = GridSpec::new(sec.horizon, sec.m)?;
    std::fs::create_dir_all(out)?;
    let mut manifest = RunManifest::new("simulate", json!({"section": sec, "seed": seed}));
    let path = out.join("paths.csv");
    manifest.stage("simulate", || {
        let cholesky = match sec.sampler {
            SamplerKind::Cholesky if sec.hurst < 1.0 => Some(CholeskySampler::new(sec.hurst, &grid)?),
            _ => None,
        };
        let mut w = csv::Writer::from_path(&path)?;
        w.write_record(["path_id", "hurst", "k", "t", "value"])?;
        for i in 0..sec.n_paths {
            let mut rng = stream(seed, Domain::Paths, i);
            let p = match &cholesky {
                Some(c) => c.sample(&mut rng),
                None => sample_path(sec.hurst, &grid, &mut rng)?,
            };
            for (k, (t, v)) in p.times().zip(&p.values).enumerate() {
                w.write_record([
                    i.to_string(),
                    sec.hurst.to_string(),
                    k.to_string(),
                    t.to_string(),
                    v.to_string(),
                ])?;
            }
        }
        w.flush()?;
        Ok(())
    })?;
    manifest.add_output(&path)?;
    manifest.write(out)?;
    println!("wrote {} paths to {}", sec.n_paths, path.display());
    Ok(path)
}
