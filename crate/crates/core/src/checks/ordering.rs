//! Orderings of below-barrier probabilities across Hurst exponents.

use serde::{Deserialize, Serialize};

use super::{BoundCheck, K_SIGMA};
use crate::error::{Error, Result};
use crate::estimate::McEstimate;
use crate::hurst_law::HurstLaw;
use crate::persistence::{estimate_persistence_fixed, estimate_small_barrier, McConfig};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrderingRow {
    pub hurst: f64,
    pub estimate: McEstimate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlepianReport {
    pub epsilon: f64,
    pub rows: Vec<OrderingRow>,
    /// One check per consecutive pair `K < H`: `p̂(K) ≤ p̂(H)`.
    pub pairs: Vec<BoundCheck>,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonotonicityProbe {
    pub horizon: f64,
    pub rows: Vec<OrderingRow>,
    /// Consecutive pairs whose intervals are disjoint with `p̂` decreasing.
    pub findings: Vec<String>,
}

fn check_h_grid(h_grid: &[f64]) -> Result<()> {
    if h_grid.is_empty() {
        return Err(Error::InvalidConfig("hurst grid is empty".into()));
    }
    if h_grid.iter().any(|&h| !(h > 0.0 && h < 1.0)) || h_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidConfig(
            "hurst grid must be strictly ascending within (0,1)".into(),
        ));
    }
    Ok(())
}

/// `P(max_{[0,1]} B^H ≤ ε)` across `h_grid`; consecutive pairs must be
/// ordered within `K_SIGMA·(SE_K + SE_H)`.
pub fn check_slepian_monotonicity(epsilon: f64, h_grid: &[f64], cfg: &McConfig) -> Result<SlepianReport> {
    check_h_grid(h_grid)?;
    let rows = h_grid
        .iter()
        .map(|&h| {
            Ok(OrderingRow {
                hurst: h,
                estimate: estimate_small_barrier(&HurstLaw::point(h), epsilon, cfg)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let pairs: Vec<BoundCheck> = rows
        .windows(2)
        .map(|w| {
            let (k, h) = (&w[0], &w[1]);
            let (sk, sh) = (k.estimate.std_err, h.estimate.std_err);
            BoundCheck::with_slack(
                format!("slepian(eps={epsilon},K={},H={})", k.hurst, h.hurst),
                k.estimate.p_hat,
                sk,
                h.estimate.p_hat,
                sh,
                K_SIGMA * (sk + sh),
            )
        })
        .collect();
    let pass = pairs.iter().all(|c| c.pass);
    Ok(SlepianReport {
        epsilon,
        rows,
        pairs,
        pass,
    })
}

/// Tabulates `P(max_{[0,T]} B^H ≤ barrier)` across `h_grid`. Decreases
/// with disjoint intervals are reported as findings, never as failures.
pub fn probe_monotonicity_conjecture(horizon: f64, h_grid: &[f64], cfg: &McConfig) -> Result<MonotonicityProbe> {
    check_h_grid(h_grid)?;
    if horizon.is_nan() || horizon < 1.0 {
        return Err(Error::InvalidConfig(format!("horizon must be >= 1, got {horizon}")));
    }
    let rows = h_grid
        .iter()
        .map(|&h| {
            Ok(OrderingRow {
                hurst: h,
                estimate: estimate_persistence_fixed(h, horizon, cfg)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let findings = rows
        .windows(2)
        .filter(|w| w[1].estimate.ci_hi < w[0].estimate.ci_lo)
        .map(|w| {
            format!(
                "T={horizon}: p({})={:.6} < p({})={:.6} with disjoint intervals",
                w[1].hurst, w[1].estimate.p_hat, w[0].hurst, w[0].estimate.p_hat
            )
        })
        .collect();
    Ok(MonotonicityProbe {
        horizon,
        rows,
        findings,
    })
}
