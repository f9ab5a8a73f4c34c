//! Right-to-left record times on unit-step paths.
//!
//! For a path `B_0, …, B_{n+n²}`, index `m ∈ 1..=n²` is a record when
//! `B_m > max_{m<k≤n+n²} B_k`. The expected number of records is bounded by
//! `n²·P(max_{1≤k≤n} B_k < 0)`; both sides are estimated on the same paths.

use serde::{Deserialize, Serialize};

use super::BoundCheck;
use crate::error::{Error, Result};
use crate::estimate::{McEstimate, MeanStats};
use crate::exec::{map_paths, PathJob};
use crate::paths::GridSpec;
use crate::persistence::McConfig;

/// Cap on `n + n²`.
pub const RECORD_MAX_POINTS: usize = 20_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecordStats {
    pub n: usize,
    /// `Ê[T_n]`.
    pub expected_records: McEstimate,
    /// `P̂(max_{1≤k≤n} B_k < 0)`.
    pub persistence_n2: McEstimate,
    /// Paired check `Ê[T_n] ≤ n²·P̂`; `lhs_se` carries the standard error
    /// of the per-path difference.
    pub check: BoundCheck,
}

/// Records among indices `1..=n2` of `values`, by one right-to-left scan.
pub fn count_records(values: &[f64], n2: usize) -> u64 {
    let mut suffix_max = f64::NEG_INFINITY;
    let mut count = 0;
    for m in (1..values.len()).rev() {
        if m <= n2 && values[m] > suffix_max {
            count += 1;
        }
        suffix_max = suffix_max.max(values[m]);
    }
    count
}

/// Quadratic reference implementation of [`count_records`].
pub fn count_records_brute_force(values: &[f64], n2: usize) -> u64 {
    let last = values.len() - 1;
    (1..=n2.min(last))
        .filter(|&m| ((m + 1)..=last).all(|k| values[k] < values[m]))
        .count() as u64
}

pub fn count_right_to_left_records(hurst: f64, n: usize, cfg: &McConfig) -> Result<RecordStats> {
    if !(hurst > 0.0 && hurst < 1.0) {
        return Err(Error::Domain(format!("hurst must be in (0,1), got {hurst}")));
    }
    if n < 2 {
        return Err(Error::Domain(format!("record check needs n >= 2, got {n}")));
    }
    let n2 = n * n;
    let len = n + n2;
    if len > RECORD_MAX_POINTS {
        return Err(Error::SizeExceeded {
            size: len,
            cap: RECORD_MAX_POINTS,
        });
    }
    cfg.validate()?;
    let job = PathJob {
        hurst,
        grid: GridSpec::new(len as f64, 1)?,
        n_paths: cfg.n_paths,
        seed: cfg.seed,
        workers: cfg.workers,
    };
    let chunks = map_paths(
        &job,
        || [MeanStats::default(); 3],
        |acc, _, values| {
            let records = count_records(values, n2) as f64;
            let below = values[1..=n].iter().all(|&v| v < 0.0);
            let scaled = if below { n2 as f64 } else { 0.0 };
            acc[0].push(records);
            acc[1].push(f64::from(u8::from(below)));
            acc[2].push(scaled - records);
        },
    )?;
    let mut total = [MeanStats::default(); 3];
    for c in &chunks {
        for (t, s) in total.iter_mut().zip(c) {
            t.merge(s);
        }
    }
    let expected_records = McEstimate::mean(&total[0], cfg.ci_level);
    let hits = (total[1].mean * total[1].n as f64).round() as u64;
    let persistence_n2 = McEstimate::proportion(hits, total[1].n, cfg.ci_level);
    let rhs = n2 as f64 * persistence_n2.p_hat;
    let lhs = expected_records.p_hat;
    let mut check = BoundCheck::statistical(format!("records(H={hurst},n={n})"), lhs, total[2].std_err(), rhs, 0.0);
    // Paired difference: the margin is the mean of n²·1{S_n<0} − T_n.
    check.margin = total[2].mean;
    check.pass = check.margin >= -check.slack;
    Ok(RecordStats {
        n,
        expected_records,
        persistence_n2,
        check,
    })
}
