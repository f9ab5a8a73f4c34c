//! Expected maximum, exponential moment and the inverse exponential
//! functional.

use serde::{Deserialize, Serialize};

use super::BoundCheck;
use crate::error::{Error, Result};
use crate::estimate::{McEstimate, MeanStats};
use crate::exec::{path_means, PathJob};
use crate::paths::{log_trapezoid_exp, max_and_abs_max, GridSpec};
use crate::persistence::{estimate_expectations, grid_points_per_unit, Functional, McConfig};

/// Largest θ accepted by the exponential-moment check.
pub const MAX_THETA: f64 = 4.0;

fn check_open_hurst(hurst: f64) -> Result<()> {
    if hurst > 0.0 && hurst < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("hurst must be in (0,1), got {hurst}")))
    }
}

/// `1/(2√(Hπe·ln 2))`.
pub fn expected_max_lower(hurst: f64) -> f64 {
    use std::f64::consts::{E, LN_2, PI};
    1.0 / (2.0 * (hurst * PI * E * LN_2).sqrt())
}

/// `16.3/√H`.
pub fn expected_max_upper(hurst: f64) -> f64 {
    16.3 / hurst.sqrt()
}

/// `2·exp(16.3θ/√H + 4θ²)`.
pub fn mgf_upper(hurst: f64, theta: f64) -> f64 {
    2.0 * (16.3 * theta / hurst.sqrt() + 4.0 * theta * theta).exp()
}

/// Lower and upper bound checks on `E[max_{[0,1]} B^H]`, estimated on the
/// grid the configuration's rule assigns to `hurst`.
pub fn check_expected_max_bounds(hurst: f64, cfg: &McConfig) -> Result<[BoundCheck; 2]> {
    check_open_hurst(hurst)?;
    let e = estimate_expectations(&[Functional::Max01], hurst, cfg)?[0];
    Ok([
        BoundCheck::statistical(
            format!("expected_max_lower(H={hurst})"),
            expected_max_lower(hurst),
            0.0,
            e.p_hat,
            e.std_err,
        ),
        BoundCheck::statistical(
            format!("expected_max_upper(H={hurst})"),
            e.p_hat,
            e.std_err,
            expected_max_upper(hurst),
            0.0,
        ),
    ])
}

pub fn check_mgf_bound(hurst: f64, theta: f64, cfg: &McConfig) -> Result<BoundCheck> {
    check_open_hurst(hurst)?;
    if !(theta > 0.0 && theta <= MAX_THETA) {
        return Err(Error::Domain(format!("theta must be in (0, {MAX_THETA}], got {theta}")));
    }
    let e = estimate_expectations(&[Functional::Mgf { theta }], hurst, cfg)?[0];
    Ok(BoundCheck::statistical(
        format!("mgf(H={hurst},theta={theta})"),
        e.p_hat,
        e.std_err,
        mgf_upper(hurst, theta),
        0.0,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Statement1Row {
    pub horizon: f64,
    /// `ĝ(T, H)` with its normal interval.
    pub g_hat: McEstimate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Statement1Report {
    pub hurst: f64,
    pub rows: Vec<Statement1Row>,
    /// `|ĝ(T_first)| − |ĝ(T_last)| − (hw_first + hw_last)`.
    pub shrinkage_margin: f64,
    pub pass: bool,
}

/// Per-path terms `(inv_T − 1/T)/(H·T^{H−1}) − M` for each horizon, where
/// `inv_T = (T·∫₀¹ e^{T^H B_u} du)^{-1}` and `M` is the grid maximum.
pub fn statement1_terms(hurst: f64, horizons: &[f64], step: f64, values: &[f64], out: &mut [f64]) {
    let max = max_and_abs_max(values).0;
    for (o, &t) in out.iter_mut().zip(horizons) {
        let inv = (-(t.ln() + log_trapezoid_exp(values, t.powf(hurst), step))).exp();
        *o = (inv - 1.0 / t) / (hurst * t.powf(hurst - 1.0)) - max;
    }
}

/// Estimates `ĝ(T, H)` on shared paths for every `T` and checks that `|ĝ|`
/// shrinks from the first to the last horizon by more than the combined
/// interval half-widths.
pub fn check_statement1(hurst: f64, horizons: &[f64], cfg: &McConfig) -> Result<Statement1Report> {
    check_open_hurst(hurst)?;
    cfg.validate()?;
    if horizons.len() < 2 {
        return Err(Error::InvalidConfig("statement1 needs at least two horizons".into()));
    }
    if horizons.iter().any(|&t| !(t >= 1.0 && t.is_finite())) || horizons.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidConfig(
            "statement1 horizons must be ascending and >= 1".into(),
        ));
    }
    let grid = GridSpec::unit(grid_points_per_unit(hurst, cfg.grid_rule))?;
    let step = grid.step();
    let job = PathJob {
        hurst,
        grid,
        n_paths: cfg.n_paths,
        seed: cfg.seed,
        workers: cfg.workers,
    };
    let stats: Vec<MeanStats> = path_means(&job, horizons.len(), |values, out| {
        statement1_terms(hurst, horizons, step, values, out)
    })?;
    let rows: Vec<Statement1Row> = horizons
        .iter()
        .zip(&stats)
        .map(|(&horizon, s)| Statement1Row {
            horizon,
            g_hat: McEstimate::mean(s, cfg.ci_level),
        })
        .collect();
    let (first, last) = (rows[0].g_hat, rows[rows.len() - 1].g_hat);
    let shrinkage_margin = first.p_hat.abs() - last.p_hat.abs() - (first.half_width() + last.half_width());
    Ok(Statement1Report {
        hurst,
        rows,
        shrinkage_margin,
        pass: shrinkage_margin > 0.0,
    })
}
