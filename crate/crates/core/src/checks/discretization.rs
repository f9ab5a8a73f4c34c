//! Gap between the continuous and the discrete maximum on `[0, 1]`.
//!
//! The continuous maximum is replaced by the maximum over a grid
//! [`SURROGATE_REFINE`] times finer than the finest target grid. All target
//! grids are subsets of that grid and are read from the same paths, so the
//! gap is nonnegative path by path.

use serde::{Deserialize, Serialize};

use super::BoundCheck;
use crate::error::{Error, Result};
use crate::estimate::{McEstimate, MeanStats};
use crate::exec::{map_paths, PathJob};
use crate::paths::GridSpec;
use crate::persistence::McConfig;

pub const SURROGATE_REFINE: u32 = 16;

/// Largest surrogate grid, in steps on `[0, 1]`.
pub const MAX_SURROGATE_POINTS: u32 = 1 << 20;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscretizationCheck {
    pub hurst: f64,
    pub n_grid: u32,
    pub gap: McEstimate,
    /// Smallest per-path gap; never negative.
    pub min_path_gap: f64,
    pub check: BoundCheck,
}

/// `12·√(ln n)/n^H`.
pub fn discretization_bound(hurst: f64, n: u32) -> f64 {
    let n = f64::from(n);
    12.0 * n.ln().sqrt() / n.powf(hurst)
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub fn check_discretization_error(hurst: f64, n_grid: u32, cfg: &McConfig) -> Result<BoundCheck> {
    Ok(check_discretization_errors(hurst, &[n_grid], cfg)?.remove(0).check)
}

/// Bound checks for every `n` in `n_grids`, all on one set of paths.
pub fn check_discretization_errors(hurst: f64, n_grids: &[u32], cfg: &McConfig) -> Result<Vec<DiscretizationCheck>> {
    if !(hurst > 0.0 && hurst < 1.0) {
        return Err(Error::Domain(format!("hurst must be in (0,1), got {hurst}")));
    }
    if n_grids.is_empty() {
        return Err(Error::InvalidConfig(
            "discretization check needs at least one grid".into(),
        ));
    }
    cfg.validate()?;
    let threshold = 2f64.powf(1.0 / hurst);
    for &n in n_grids {
        if f64::from(n) < threshold {
            return Err(Error::PreconditionViolated(format!(
                "grid size {n} is below 2^(1/H) = {threshold:.4} for H = {hurst}"
            )));
        }
    }
    let lcm = n_grids
        .iter()
        .fold(1u64, |acc, &n| acc / u64::from(gcd(acc as u32, n)) * u64::from(n));
    let fine = lcm * u64::from(SURROGATE_REFINE);
    if fine > u64::from(MAX_SURROGATE_POINTS) {
        return Err(Error::SizeExceeded {
            size: fine as usize,
            cap: MAX_SURROGATE_POINTS as usize,
        });
    }
    let fine = fine as u32;
    let strides: Vec<usize> = n_grids.iter().map(|&n| (fine / n) as usize).collect();
    let job = PathJob {
        hurst,
        grid: GridSpec::unit(fine)?,
        n_paths: cfg.n_paths,
        seed: cfg.seed,
        workers: cfg.workers,
    };
    let k = n_grids.len();
    let chunks = map_paths(
        &job,
        || (vec![MeanStats::default(); k], vec![f64::INFINITY; k]),
        |(stats, mins), _, values| {
            let cont = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            for ((s, lo), &stride) in stats.iter_mut().zip(mins.iter_mut()).zip(&strides) {
                let coarse = values[stride..]
                    .iter()
                    .step_by(stride)
                    .cloned()
                    .fold(f64::NEG_INFINITY, f64::max);
                let gap = cont - coarse;
                s.push(gap);
                *lo = lo.min(gap);
            }
        },
    )?;
    let mut stats = vec![MeanStats::default(); k];
    let mut mins = vec![f64::INFINITY; k];
    for (cs, cm) in &chunks {
        for i in 0..k {
            stats[i].merge(&cs[i]);
            mins[i] = mins[i].min(cm[i]);
        }
    }
    Ok(n_grids
        .iter()
        .enumerate()
        .map(|(i, &n)| {
            let gap = McEstimate::mean(&stats[i], cfg.ci_level);
            DiscretizationCheck {
                hurst,
                n_grid: n,
                gap,
                min_path_gap: mins[i],
                check: BoundCheck::statistical(
                    format!("discretization(H={hurst},n={n})"),
                    gap.p_hat,
                    gap.std_err,
                    discretization_bound(hurst, n),
                    0.0,
                ),
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bound_formula() {
        assert!((discretization_bound(0.5, 16) - 12.0 * 16f64.ln().sqrt() / 4.0).abs() < 1e-12);
        assert!((discretization_bound(0.5, 16) - 4.9956).abs() < 1e-3);
    }

    #[test]
    fn precondition() {
        let cfg = McConfig::new(100, 1);
        assert!(matches!(
            check_discretization_error(0.5, 3, &cfg),
            Err(Error::PreconditionViolated(_))
        ));
        assert!(check_discretization_error(0.5, 4, &cfg).is_ok());
    }

    /// Spitzer: `E max_{0≤k≤n} S_k = Σ_{k=1}^n E[S_k⁺]/k` for a Gaussian
    /// walk with step variance `1/scale`.
    fn spitzer(n: u32, scale: u32) -> f64 {
        (1..=n).map(|k| 1.0 / f64::from(k).sqrt()).sum::<f64>() / (2.0 * std::f64::consts::PI * f64::from(scale)).sqrt()
    }

    #[test]
    fn brownian_gap_matches_walk_oracle() {
        let cfg = McConfig::new(20_000, 4);
        let r = check_discretization_errors(0.5, &[16, 64], &cfg).unwrap();
        let fine = 64 * SURROGATE_REFINE;
        for c in &r {
            assert!(c.min_path_gap >= 0.0);
            assert!(c.check.pass);
            // max over k=1..n equals S_1 plus a walk maximum over n−1 steps.
            let exact = spitzer(fine, fine) - spitzer(c.n_grid - 1, c.n_grid);
            assert!(
                (c.gap.p_hat - exact).abs() < 5.0 * c.gap.std_err,
                "n={} {} vs {exact}",
                c.n_grid,
                c.gap.p_hat
            );
        }
        assert!(r[1].gap.p_hat < r[0].gap.p_hat);
    }
}
