//! Deterministic formula checks and the iid extreme-value constants.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::BoundCheck;
use crate::error::{Error, Result};
use crate::estimate::McEstimate;
use crate::exec::run_chunks;
use crate::normal::{cdf, pdf, upper_tail};
use crate::paths::{fbm_cov, CHOLESKY_MAX_POINTS};
use crate::rng::{stream, Domain};

/// Covariances of `B_{k/n}, B_{l/n}` and of the comparison process
/// `X_k = ((k/n)^H N_k − W_{(k/n)^{2H}})/√2`.
pub fn bz_comparison_cov(hurst: f64, n: usize, k: usize, l: usize) -> Result<(f64, f64)> {
    if !(hurst > 0.0 && hurst <= 1.0) {
        return Err(Error::Domain(format!("hurst must be in (0,1], got {hurst}")));
    }
    if n == 0 || k == 0 || l == 0 || k > n || l > n {
        return Err(Error::Domain(format!("need 1 <= k, l <= n, got k={k}, l={l}, n={n}")));
    }
    let (s, t) = (k as f64 / n as f64, l as f64 / n as f64);
    let fbm = fbm_cov(hurst, s, t);
    let x = if k == l {
        s.powf(2.0 * hurst)
    } else {
        0.5 * s.powf(2.0 * hurst).min(t.powf(2.0 * hurst))
    };
    Ok((fbm, x))
}

/// `a_n = 1/√(2 ln n)` and `b_n = √(2 ln n) − (ln ln n + ln 4π)/(2√(2 ln n))`.
pub fn extreme_value_constants(n: u64) -> Result<(f64, f64)> {
    if n < 3 {
        return Err(Error::Domain(format!("extreme value constants need n >= 3, got {n}")));
    }
    let l = (n as f64).ln();
    let r = (2.0 * l).sqrt();
    let b = r - (l.ln() + (4.0 * std::f64::consts::PI).ln()) / (2.0 * r);
    Ok((1.0 / r, b))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtremeValueReport {
    pub n: u64,
    pub a_n: f64,
    pub b_n: f64,
    /// `P̂(max of n iid normals ≤ b_n)`.
    pub estimate: McEstimate,
    /// `Φ(b_n)^n`.
    pub exact: f64,
    /// Distance of the exact value from the limit `e^{-1}`.
    pub distance_to_limit: f64,
    /// Two-sided agreement of the estimate with the exact value.
    pub check: BoundCheck,
}

/// Brute-force estimate of `P(max of n iid N(0,1) ≤ b_n)`.
pub fn extreme_value_mc(n: u64, trials: u64, seed: u64, workers: usize) -> Result<ExtremeValueReport> {
    let (a_n, b_n) = extreme_value_constants(n)?;
    if trials < 100 {
        return Err(Error::InvalidConfig(format!("need at least 100 trials, got {trials}")));
    }
    let chunks = run_chunks(trials, workers, |start, end| {
        let mut hits = 0u64;
        for i in start..end {
            let mut rng = stream(seed, Domain::Paths, i);
            if (0..n).all(|_| rng.sample::<f64, _>(StandardNormal) <= b_n) {
                hits += 1;
            }
        }
        Ok(hits)
    })?;
    let estimate = McEstimate::proportion(chunks.iter().sum(), trials, 0.95);
    let exact = (n as f64 * cdf(b_n).ln()).exp();
    let diff = (estimate.p_hat - exact).abs();
    Ok(ExtremeValueReport {
        n,
        a_n,
        b_n,
        estimate,
        exact,
        distance_to_limit: (exact - (-1f64).exp()).abs(),
        check: BoundCheck::statistical(format!("extreme_value(n={n})"), diff, estimate.std_err, 0.0, 0.0),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MillsRow {
    pub x: f64,
    /// `φ(x)/(x + 1/x)`; zero at `x = 0`.
    pub lower: f64,
    /// `Φ(−x)`.
    pub tail: f64,
    /// `φ(x)/x`; absent at `x = 0`.
    pub upper: Option<f64>,
    /// `upper/lower`, which tends to 1.
    pub bound_ratio: Option<f64>,
    pub pass: bool,
}

/// `φ(x)/(x+1/x) ≤ Φ(−x) ≤ φ(x)/x` on every grid point.
pub fn mills_ratio_check(x_grid: &[f64]) -> Result<Vec<MillsRow>> {
    x_grid
        .iter()
        .map(|&x| {
            if !(x >= 0.0 && x.is_finite()) {
                return Err(Error::Domain(format!("mills grid needs finite x >= 0, got {x}")));
            }
            let tail = upper_tail(x);
            if x == 0.0 {
                return Ok(MillsRow {
                    x,
                    lower: 0.0,
                    tail,
                    upper: None,
                    bound_ratio: None,
                    pass: tail >= 0.0,
                });
            }
            let phi = pdf(x);
            let lower = phi / (x + 1.0 / x);
            let upper = phi / x;
            Ok(MillsRow {
                x,
                lower,
                tail,
                upper: Some(upper),
                bound_ratio: Some(upper / lower),
                pass: lower <= tail && tail <= upper,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RkhsQuantities {
    /// `min_t K(1, t)` over `t ∈ {1 + k/m : k = 0..=(n−1)m}`.
    pub kappa: f64,
    /// `min_t 2K(1, t)/κ`.
    pub f_min: f64,
    /// `(2/κ)²·K(1, 1)`.
    pub f_norm_sq: f64,
}

pub fn rkhs_shift_quantities(hurst: f64, n: usize, m: usize) -> Result<RkhsQuantities> {
    if !(hurst > 0.0 && hurst <= 1.0) {
        return Err(Error::Domain(format!("hurst must be in (0,1], got {hurst}")));
    }
    if n < 1 || m < 1 {
        return Err(Error::Domain(format!("need n, m >= 1, got n={n}, m={m}")));
    }
    let size = (n - 1) * m + 1;
    if size > CHOLESKY_MAX_POINTS {
        return Err(Error::SizeExceeded {
            size,
            cap: CHOLESKY_MAX_POINTS,
        });
    }
    let k: Vec<f64> = (0..size)
        .map(|j| fbm_cov(hurst, 1.0, 1.0 + j as f64 / m as f64))
        .collect();
    let kappa = k.iter().cloned().fold(f64::INFINITY, f64::min);
    let f_min = k.iter().map(|&v| 2.0 * v / kappa).fold(f64::INFINITY, f64::min);
    let f_norm_sq = (2.0 / kappa).powi(2) * fbm_cov(hurst, 1.0, 1.0);
    Ok(RkhsQuantities {
        kappa,
        f_min,
        f_norm_sq,
    })
}
