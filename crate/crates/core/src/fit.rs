//! Weighted log-log regression for persistence exponents.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimate::McEstimate;
use crate::hurst_law::HurstLaw;

/// Points with fewer hits than this are left out of a fit.
pub const MIN_FIT_HITS: u64 = 10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitPoint {
    pub x: f64,
    pub p_hat: f64,
    pub std_err: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentFit {
    pub slope: f64,
    pub slope_se: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub n_points: usize,
}

/// WLS of `ln p̂` on `ln x` with delta-method weights `(p̂/se)²`.
///
/// When every point has zero standard error the fit is unweighted and the
/// slope error comes from the residuals. Sums run in ascending `x`, so the
/// result does not depend on input order.
pub fn fit_exponent(points: &[FitPoint]) -> Result<ExponentFit> {
    if points.len() < 3 {
        return Err(Error::InvalidConfig(format!(
            "need at least 3 fit points, got {}",
            points.len()
        )));
    }
    for p in points {
        if !(p.x > 0.0 && p.x.is_finite()) {
            return Err(Error::InvalidConfig(format!("fit x must be positive, got {}", p.x)));
        }
        if !(p.p_hat > 0.0 && p.p_hat <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "fit p_hat must be in (0,1], got {}",
                p.p_hat
            )));
        }
        if !(p.std_err >= 0.0 && p.std_err.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "fit std_err must be finite and >= 0, got {}",
                p.std_err
            )));
        }
    }
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| {
        a.x.total_cmp(&b.x)
            .then(a.p_hat.total_cmp(&b.p_hat))
            .then(a.std_err.total_cmp(&b.std_err))
    });
    if pts.windows(2).any(|w| w[0].x.ln() == w[1].x.ln()) {
        return Err(Error::DegenerateDesign("x values coincide on the log scale".into()));
    }

    let xs: Vec<f64> = pts.iter().map(|p| p.x.ln()).collect();
    let ys: Vec<f64> = pts.iter().map(|p| p.p_hat.ln()).collect();
    let vars: Vec<f64> = pts.iter().map(|p| (p.std_err / p.p_hat).powi(2)).collect();
    let weighted = vars.iter().any(|&v| v > 0.0);
    let weights: Vec<f64> = if weighted {
        let floor = vars.iter().cloned().filter(|&v| v > 0.0).fold(f64::INFINITY, f64::min) * 1e-12;
        vars.iter().map(|&v| 1.0 / v.max(floor)).collect()
    } else {
        vec![1.0; pts.len()]
    };

    let sw: f64 = weights.iter().sum();
    let xbar = weights.iter().zip(&xs).map(|(w, x)| w * x).sum::<f64>() / sw;
    let ybar = weights.iter().zip(&ys).map(|(w, y)| w * y).sum::<f64>() / sw;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for ((w, x), y) in weights.iter().zip(&xs).zip(&ys) {
        let (dx, dy) = (x - xbar, y - ybar);
        sxx += w * dx * dx;
        sxy += w * dx * dy;
        syy += w * dy * dy;
    }
    if sxx.is_nan() || sxx <= 0.0 {
        return Err(Error::DegenerateDesign("zero spread in ln x".into()));
    }
    let slope = sxy / sxx;
    let intercept = ybar - slope * xbar;
    let sse = (syy - slope * sxy).max(0.0);
    let r_squared = if syy > 0.0 {
        (1.0 - sse / syy).clamp(0.0, 1.0)
    } else {
        1.0
    };
    let slope_se = if weighted {
        (1.0 / sxx).sqrt()
    } else {
        (sse / (pts.len() - 2) as f64 / sxx).sqrt()
    };
    Ok(ExponentFit {
        slope,
        slope_se,
        intercept,
        r_squared,
        n_points: pts.len(),
    })
}

/// Converts estimates at `xs` into fit points, dropping those with fewer
/// than [`MIN_FIT_HITS`] hits.
pub fn fit_points(xs: &[f64], estimates: &[McEstimate]) -> Vec<FitPoint> {
    xs.iter()
        .zip(estimates)
        .filter_map(|(&x, e)| {
            let hits = e.n_hits.unwrap_or(u64::MAX);
            if hits < MIN_FIT_HITS {
                log::warn!("dropping fit point x={x}: only {hits} hits");
                None
            } else {
                Some(FitPoint {
                    x,
                    p_hat: e.p_hat,
                    std_err: e.std_err,
                })
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ExponentKind {
    FixedH { h: f64 },
    Annealed { law: HurstLaw },
    SmallBarrier { law: HurstLaw },
}

/// Predicted decay exponent: `1 − H`, `1 − H₀` or `(1 − H₀)/H₀`.
pub fn predicted_exponent(kind: &ExponentKind) -> f64 {
    match kind {
        ExponentKind::FixedH { h } => 1.0 - h,
        ExponentKind::Annealed { law } => 1.0 - law.ess_sup().h0,
        ExponentKind::SmallBarrier { law } => {
            let h0 = law.ess_sup().h0;
            (1.0 - h0) / h0
        }
    }
}
