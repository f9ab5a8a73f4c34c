//! Probability of staying below −1 on `[1, n]`.

use super::BoundCheck;
use crate::error::{Error, Result};
use crate::estimate::McEstimate;
use crate::exec::{map_paths, PathJob};
use crate::paths::GridSpec;
use crate::persistence::{estimate_expectation, Functional, GridRule, McConfig};
use crate::rng::derive_seed;

/// Grid used for the `E[max_{[0,1]} B^H]` factor of the bound.
pub const MAX_ESTIMATE_GRID: u32 = 1024;

/// Whether `B(1 + k/m) ≤ −1` for all `k = 0..=(n−1)m`, given values on the
/// grid `{j/m : j = 0..=n·m}`.
pub fn negative_barrier_event(values: &[f64], m: usize, n: usize) -> bool {
    values[m..=n * m].iter().all(|&v| v <= -1.0)
}

/// `P̂(max_{k=0..(n−1)m} B(1+k/m) ≤ −1) ≤ 4n^{H−1}·Ê[max_{[0,1]} B^H]/m`.
///
/// The expectation on the right uses an independent seed and its standard
/// error enters the slack.
pub fn check_negative_barrier_bound(hurst: f64, n: usize, m: u32, cfg: &McConfig) -> Result<BoundCheck> {
    if !(hurst > 0.0 && hurst < 1.0) {
        return Err(Error::Domain(format!("hurst must be in (0,1), got {hurst}")));
    }
    if n < 2 || m == 0 {
        return Err(Error::Domain(format!(
            "negative barrier check needs n >= 2 and m >= 1, got n={n}, m={m}"
        )));
    }
    cfg.validate()?;
    let job = PathJob {
        hurst,
        grid: GridSpec::new(n as f64, m)?,
        n_paths: cfg.n_paths,
        seed: cfg.seed,
        workers: cfg.workers,
    };
    let mu = m as usize;
    let chunks = map_paths(
        &job,
        || 0u64,
        |hits, _, values| {
            if negative_barrier_event(values, mu, n) {
                *hits += 1;
            }
        },
    )?;
    let lhs = McEstimate::proportion(chunks.iter().sum(), cfg.n_paths, cfg.ci_level);
    let max_cfg = cfg
        .with_seed(derive_seed(cfg.seed, "negative_barrier/max01"))
        .with_grid(GridRule::Fixed { m: MAX_ESTIMATE_GRID });
    let e_max = estimate_expectation(Functional::Max01, hurst, &max_cfg)?;
    let factor = 4.0 * (n as f64).powf(hurst - 1.0) / f64::from(m);
    Ok(BoundCheck::statistical(
        format!("negative_barrier(H={hurst},n={n},m={m})"),
        lhs.p_hat,
        lhs.std_err,
        factor * e_max.p_hat,
        factor * e_max.std_err,
    ))
}
