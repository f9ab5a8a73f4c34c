//! Monte-Carlo estimates with confidence intervals.

use serde::{Deserialize, Serialize};

use crate::normal::two_sided_z;

/// Probability or expectation estimate.
///
/// For probabilities `p_hat = n_hits / n_paths` and the interval is Wilson's;
/// for expectations `n_hits` is `None` and the interval is normal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub p_hat: f64,
    pub std_err: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub n_paths: u64,
    pub n_hits: Option<u64>,
}

impl McEstimate {
    pub fn proportion(n_hits: u64, n_paths: u64, ci_level: f64) -> Self {
        let n = n_paths as f64;
        let p = n_hits as f64 / n;
        let (lo, hi) = wilson_interval(n_hits, n_paths, ci_level);
        Self {
            p_hat: p,
            std_err: (p * (1.0 - p) / n).sqrt(),
            ci_lo: lo.min(p),
            ci_hi: hi.max(p),
            n_paths,
            n_hits: Some(n_hits),
        }
    }

    pub fn mean(stats: &MeanStats, ci_level: f64) -> Self {
        let se = stats.std_err();
        let z = two_sided_z(ci_level);
        Self {
            p_hat: stats.mean,
            std_err: se,
            ci_lo: stats.mean - z * se,
            ci_hi: stats.mean + z * se,
            n_paths: stats.n,
            n_hits: None,
        }
    }

    pub fn half_width(&self) -> f64 {
        0.5 * (self.ci_hi - self.ci_lo)
    }
}

/// Wilson score interval for a binomial proportion.
pub fn wilson_interval(n_hits: u64, n_paths: u64, ci_level: f64) -> (f64, f64) {
    let n = n_paths as f64;
    let p = n_hits as f64 / n;
    let z = two_sided_z(ci_level);
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// Streaming mean/variance with a deterministic merge (Chan et al.).
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct MeanStats {
    pub n: u64,
    pub mean: f64,
    m2: f64,
}

impl MeanStats {
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    pub fn merge(&mut self, other: &MeanStats) {
        if other.n == 0 {
            return;
        }
        if self.n == 0 {
            *self = *other;
            return;
        }
        let (na, nb) = (self.n as f64, other.n as f64);
        let n = na + nb;
        let d = other.mean - self.mean;
        self.mean += d * nb / n;
        self.m2 += other.m2 + d * d * na * nb / n;
        self.n += other.n;
    }

    pub fn variance(&self) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            self.m2 / (self.n - 1) as f64
        }
    }

    pub fn std_err(&self) -> f64 {
        if self.n == 0 {
            return f64::NAN;
        }
        (self.variance() / self.n as f64).sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn wilson_reference() {
        // 95% Wilson interval for 10/100.
        let (lo, hi) = wilson_interval(10, 100, 0.95);
        assert_relative_eq!(lo, 0.055_229_2, epsilon = 1e-6);
        assert_relative_eq!(hi, 0.174_366_1, epsilon = 1e-6);
        let (lo, hi) = wilson_interval(0, 100, 0.95);
        assert_eq!(lo, 0.0);
        assert!(hi > 0.0 && hi < 0.05);
    }

    #[test]
    fn proportion_invariants() {
        for (k, n) in [(0, 100), (1, 100), (50, 100), (100, 100), (3, 1_000_000)] {
            let e = McEstimate::proportion(k, n, 0.95);
            assert!(e.ci_lo <= e.p_hat && e.p_hat <= e.ci_hi);
            assert_eq!(e.p_hat, k as f64 / n as f64);
        }
    }

    #[test]
    fn merge_matches_single_pass() {
        let xs: Vec<f64> = (0..1000).map(|i| ((i * 37) % 101) as f64 * 0.1).collect();
        let mut whole = MeanStats::default();
        xs.iter().for_each(|&x| whole.push(x));
        let mut a = MeanStats::default();
        let mut b = MeanStats::default();
        xs[..313].iter().for_each(|&x| a.push(x));
        xs[313..].iter().for_each(|&x| b.push(x));
        a.merge(&b);
        assert_eq!(a.n, whole.n);
        assert_relative_eq!(a.mean, whole.mean, epsilon = 1e-12);
        assert_relative_eq!(a.variance(), whole.variance(), epsilon = 1e-10);
    }
}
