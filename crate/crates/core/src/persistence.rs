//! Monte-Carlo estimators for persistence probabilities and path
//! expectations.
//!
//! A persistence estimate counts paths whose grid maximum stays at or below
//! the barrier. All horizons requested in one call are read off nested
//! prefixes of the same path, so a curve costs one simulation at the
//! largest horizon and is monotone in `T` path by path.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimate::McEstimate;
use crate::exec::{path_means, run_chunks, PathJob};
use crate::hurst_law::HurstLaw;
use crate::paths::{
    build_circulant_plan, log_trapezoid_exp, max_and_abs_max, steps_within, CirculantPlan, CirculantSampler, GridSpec,
};
use crate::rng::{stream, Domain};

/// Lattice used to quantize continuous Hurst draws for plan reuse.
pub const HURST_LATTICE: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum GridRule {
    /// `m` points per unit time regardless of `H`.
    Fixed { m: u32 },
    /// `⌈1/√H⌉²` points per unit time, clamped to `[m_min, m_max]`.
    InverseSqrt { m_min: u32, m_max: u32 },
}

impl Default for GridRule {
    fn default() -> Self {
        GridRule::InverseSqrt { m_min: 1, m_max: 4096 }
    }
}

impl GridRule {
    pub fn label(&self) -> String {
        match self {
            GridRule::Fixed { m } => format!("{m}"),
            GridRule::InverseSqrt { m_min, m_max } => format!("isqrt[{m_min},{m_max}]"),
        }
    }
}

pub fn grid_points_per_unit(hurst: f64, rule: GridRule) -> u32 {
    match rule {
        GridRule::Fixed { m } => m,
        GridRule::InverseSqrt { m_min, m_max } => {
            let r = (1.0 / hurst.sqrt() - 1e-9).ceil().max(1.0);
            let m = (r * r).min(f64::from(u32::MAX));
            (m as u32).clamp(m_min, m_max)
        }
    }
}

fn default_barrier() -> f64 {
    1.0
}

fn default_ci_level() -> f64 {
    0.95
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McConfig {
    pub n_paths: u64,
    pub seed: u64,
    #[serde(default)]
    pub grid_rule: GridRule,
    #[serde(default = "default_barrier")]
    pub barrier: f64,
    #[serde(default = "default_ci_level")]
    pub ci_level: f64,
    /// Worker threads; 0 uses the global pool. Never affects results.
    #[serde(default)]
    pub workers: usize,
}

impl McConfig {
    pub fn new(n_paths: u64, seed: u64) -> Self {
        Self {
            n_paths,
            seed,
            grid_rule: GridRule::default(),
            barrier: 1.0,
            ci_level: 0.95,
            workers: 0,
        }
    }

    pub fn with_grid(mut self, rule: GridRule) -> Self {
        self.grid_rule = rule;
        self
    }

    pub fn with_barrier(mut self, barrier: f64) -> Self {
        self.barrier = barrier;
        self
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_paths < 100 {
            return Err(Error::InvalidConfig(format!(
                "n_paths must be >= 100, got {}",
                self.n_paths
            )));
        }
        if !(self.ci_level > 0.0 && self.ci_level < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "ci_level must be in (0,1), got {}",
                self.ci_level
            )));
        }
        if self.barrier.is_nan() {
            return Err(Error::InvalidConfig("barrier is NaN".into()));
        }
        match self.grid_rule {
            GridRule::Fixed { m: 0 } => Err(Error::InvalidConfig("fixed grid needs m >= 1".into())),
            GridRule::InverseSqrt { m_min, m_max } if m_min == 0 || m_max < m_min => Err(Error::InvalidConfig(
                format!("inverse-sqrt rule needs 1 <= m_min <= m_max, got [{m_min}, {m_max}]"),
            )),
            _ => Ok(()),
        }
    }
}

fn quantize(h: f64, h0: f64) -> f64 {
    ((h / HURST_LATTICE).round() * HURST_LATTICE).clamp(HURST_LATTICE, h0)
}

/// Shared plan cache keyed by `(H bits, n_increments)`.
#[derive(Default)]
struct PlanCache {
    plans: Mutex<HashMap<(u64, usize), Arc<CirculantPlan>>>,
}

impl PlanCache {
    fn get(&self, hurst: f64, n: usize) -> Result<Arc<CirculantPlan>> {
        let key = (hurst.to_bits(), n);
        if let Some(p) = self.plans.lock().expect("plan cache poisoned").get(&key) {
            return Ok(Arc::clone(p));
        }
        let plan = Arc::new(build_circulant_plan(hurst, n)?);
        let mut guard = self.plans.lock().expect("plan cache poisoned");
        Ok(Arc::clone(guard.entry(key).or_insert(plan)))
    }
}

/// Per-chunk generator of first-passage indices.
///
/// Circulant samples come in independent pairs; the second path of a pair
/// is parked per `(H, n)` and handed to the next path that draws the same
/// exponent, which keeps every path an exact, independent draw.
struct PassageSampler<'a> {
    cache: &'a PlanCache,
    seed: u64,
    current: Option<((u64, usize), CirculantSampler)>,
    spares: HashMap<(u64, usize), Vec<f64>>,
    a: Vec<f64>,
    b: Vec<f64>,
}

impl<'a> PassageSampler<'a> {
    fn new(cache: &'a PlanCache, seed: u64) -> Self {
        Self {
            cache,
            seed,
            current: None,
            spares: HashMap::new(),
            a: Vec::new(),
            b: Vec::new(),
        }
    }

    /// First grid index `k ∈ 0..=n` with `B(k/m) > barrier`, or `n + 1`.
    fn first_passage(&mut self, path: u64, hurst: f64, m: u32, n: usize, barrier: f64) -> Result<usize> {
        if 0.0 > barrier {
            return Ok(0);
        }
        if barrier == f64::INFINITY || n == 0 {
            return Ok(n + 1);
        }
        let scale = (1.0 / f64::from(m)).powf(hurst);
        if hurst == 1.0 {
            let xi: f64 = stream(self.seed, Domain::Paths, path).sample(StandardNormal);
            if xi <= 0.0 {
                return Ok(n + 1);
            }
            // (k/m)·ξ > b  ⇔  k > b·m/ξ
            let k = ((barrier / (scale * xi)).floor() as usize).saturating_add(1);
            // Guard the division against rounding at the boundary.
            let k = if k > 1 && (k - 1) as f64 * scale * xi > barrier {
                k - 1
            } else {
                k
            };
            return Ok(k.min(n + 1));
        }
        if hurst == 0.5 {
            let mut rng = stream(self.seed, Domain::Paths, path);
            let mut acc = 0.0;
            for k in 1..=n {
                let z: f64 = rng.sample(StandardNormal);
                acc += z * scale;
                if acc > barrier {
                    return Ok(k);
                }
            }
            return Ok(n + 1);
        }
        let key = (hurst.to_bits(), n);
        let increments = match self.spares.remove(&key) {
            Some(spare) => {
                self.a = spare;
                &self.a
            }
            None => {
                if self.current.as_ref().map(|c| c.0) != Some(key) {
                    let plan = self.cache.get(hurst, n)?;
                    self.current = Some((key, CirculantSampler::new(plan)));
                }
                let sampler = &mut self.current.as_mut().expect("set above").1;
                self.a.resize(n, 0.0);
                let mut b = std::mem::take(&mut self.b);
                b.resize(n, 0.0);
                let mut rng = stream(self.seed, Domain::Paths, path);
                sampler.increments_pair(&mut rng, &mut self.a, &mut b);
                self.spares.insert(key, b);
                &self.a
            }
        };
        let mut acc = 0.0;
        let mut hit = n + 1;
        for (k, &dx) in increments.iter().enumerate() {
            acc += dx * scale;
            if acc > barrier {
                hit = k + 1;
                break;
            }
        }
        Ok(hit)
    }
}

/// Core survival loop: `horizons_for(h, out)` fills the horizons (in the
/// path's own time units) at which survival is recorded.
fn survival_counts<F>(
    law: &HurstLaw,
    n_horizons: usize,
    barrier: f64,
    cfg: &McConfig,
    horizons_for: F,
) -> Result<Vec<u64>>
where
    F: Fn(f64, &mut [f64]) + Sync + Send,
{
    law.validate()?;
    cfg.validate()?;
    let h0 = law.ess_sup().h0;
    let quantized = law.is_continuous();
    let cache = PlanCache::default();
    let chunks = run_chunks(cfg.n_paths, cfg.workers, |start, end| {
        let mut sampler = PassageSampler::new(&cache, cfg.seed);
        let mut hits = vec![0u64; n_horizons];
        let mut horizons = vec![0.0; n_horizons];
        let mut steps = vec![0usize; n_horizons];
        for i in start..end {
            let h = match law.as_point() {
                Some(h) => h,
                None => {
                    let raw = law.sample(&mut stream(cfg.seed, Domain::Hurst, i));
                    if quantized {
                        quantize(raw, h0)
                    } else {
                        raw
                    }
                }
            };
            let m = grid_points_per_unit(h, cfg.grid_rule);
            horizons_for(h, &mut horizons);
            let mut n_max = 0;
            for (s, &t) in steps.iter_mut().zip(&horizons) {
                *s = steps_within(t, m);
                n_max = n_max.max(*s);
            }
            let first = sampler.first_passage(i, h, m, n_max, barrier)?;
            for (hit, &s) in hits.iter_mut().zip(&steps) {
                if first > s {
                    *hit += 1;
                }
            }
        }
        Ok(hits)
    })?;
    let mut total = vec![0u64; n_horizons];
    for c in chunks {
        for (t, h) in total.iter_mut().zip(c) {
            *t += h;
        }
    }
    Ok(total)
}

/// Annealed persistence `P(max_{grid ∩ [0,T]} B^ℋ ≤ barrier)` at each `T`,
/// all read from the same paths.
pub fn estimate_persistence_curve(law: &HurstLaw, horizons: &[f64], cfg: &McConfig) -> Result<Vec<McEstimate>> {
    if horizons.is_empty() {
        return Err(Error::InvalidConfig("horizon grid is empty".into()));
    }
    if let Some(t) = horizons.iter().find(|&&t| !(t >= 1.0 && t.is_finite())) {
        return Err(Error::InvalidConfig(format!(
            "horizons must be finite and >= 1, got {t}"
        )));
    }
    let counts = survival_counts(law, horizons.len(), cfg.barrier, cfg, |_, out| {
        out.copy_from_slice(horizons)
    })?;
    Ok(counts
        .into_iter()
        .map(|k| McEstimate::proportion(k, cfg.n_paths, cfg.ci_level))
        .collect())
}

pub fn estimate_persistence_fixed(hurst: f64, horizon: f64, cfg: &McConfig) -> Result<McEstimate> {
    estimate_persistence_annealed(&HurstLaw::point(hurst), horizon, cfg)
}

pub fn estimate_persistence_annealed(law: &HurstLaw, horizon: f64, cfg: &McConfig) -> Result<McEstimate> {
    Ok(estimate_persistence_curve(law, &[horizon], cfg)?[0])
}

/// Annealed `P(max_{[0,1]} B^ℋ ≤ ε)` at each `ε`.
///
/// By self-similarity the event equals `{max_{[0, ε^{-1/H}]} B^H ≤ 1}`; the
/// grid rule is applied in that rescaled time, so the grid on `[0,1]` has
/// `m(H)·ε^{-1/H}` points per unit and the relative grid bias does not grow
/// as `ε` shrinks.
pub fn estimate_small_barrier_curve(law: &HurstLaw, epsilons: &[f64], cfg: &McConfig) -> Result<Vec<McEstimate>> {
    if epsilons.is_empty() {
        return Err(Error::InvalidConfig("epsilon grid is empty".into()));
    }
    if let Some(e) = epsilons.iter().find(|&&e| !(e > 0.0 && e.is_finite())) {
        return Err(Error::InvalidConfig(format!(
            "epsilons must be positive and finite, got {e}"
        )));
    }
    let counts = survival_counts(law, epsilons.len(), 1.0, cfg, |h, out| {
        for (o, &e) in out.iter_mut().zip(epsilons) {
            *o = e.powf(-1.0 / h);
        }
    })?;
    Ok(counts
        .into_iter()
        .map(|k| McEstimate::proportion(k, cfg.n_paths, cfg.ci_level))
        .collect())
}

pub fn estimate_small_barrier(law: &HurstLaw, epsilon: f64, cfg: &McConfig) -> Result<McEstimate> {
    Ok(estimate_small_barrier_curve(law, &[epsilon], cfg)?[0])
}

/// Path functionals on `[0, 1]` whose means are estimated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Functional {
    /// `max_{[0,1]} B`.
    Max01,
    /// `max_{[0,1]} |B|`.
    AbsMax01,
    /// `(∫₀^T e^{B_s} ds)^{-1}`, computed as `(T·∫₀¹ e^{T^H B_u} du)^{-1}`.
    ExpNegIntegral { horizon: f64 },
    /// `e^{θ·max_{[0,1]}|B|}`.
    Mgf { theta: f64 },
}

impl Functional {
    fn validate(&self) -> Result<()> {
        match *self {
            Functional::ExpNegIntegral { horizon } if !(horizon >= 1.0 && horizon.is_finite()) => Err(
                Error::InvalidConfig(format!("exp_neg_integral needs T >= 1, got {horizon}")),
            ),
            Functional::Mgf { theta } if !theta.is_finite() => {
                Err(Error::InvalidConfig("mgf theta must be finite".into()))
            }
            _ => Ok(()),
        }
    }

    fn eval(&self, hurst: f64, step: f64, values: &[f64]) -> f64 {
        match *self {
            Functional::Max01 => max_and_abs_max(values).0,
            Functional::AbsMax01 => max_and_abs_max(values).1,
            Functional::ExpNegIntegral { horizon } => {
                let log_int = horizon.ln() + log_trapezoid_exp(values, horizon.powf(hurst), step);
                (-log_int).exp()
            }
            Functional::Mgf { theta } => {
                if theta == 0.0 {
                    1.0
                } else {
                    (theta * max_and_abs_max(values).1).exp()
                }
            }
        }
    }
}

/// Means of several functionals on shared paths over `[0, 1]`.
pub fn estimate_expectations(functionals: &[Functional], hurst: f64, cfg: &McConfig) -> Result<Vec<McEstimate>> {
    cfg.validate()?;
    if !(hurst > 0.0 && hurst <= 1.0) {
        return Err(Error::Domain(format!("hurst must be in (0,1], got {hurst}")));
    }
    for f in functionals {
        f.validate()?;
    }
    let m = grid_points_per_unit(hurst, cfg.grid_rule);
    let grid = GridSpec::unit(m)?;
    let step = grid.step();
    let job = PathJob {
        hurst,
        grid,
        n_paths: cfg.n_paths,
        seed: cfg.seed,
        workers: cfg.workers,
    };
    let stats = path_means(&job, functionals.len(), |values, out| {
        for (o, f) in out.iter_mut().zip(functionals) {
            *o = f.eval(hurst, step, values);
        }
    })?;
    Ok(stats.iter().map(|s| McEstimate::mean(s, cfg.ci_level)).collect())
}

pub fn estimate_expectation(functional: Functional, hurst: f64, cfg: &McConfig) -> Result<McEstimate> {
    Ok(estimate_expectations(&[functional], hurst, cfg)?[0])
}

/// Pilot run used to refuse configurations that would see too few hits.
pub fn pilot_expected_hits(p_pilot: &McEstimate, n_paths: u64) -> f64 {
    p_pilot.p_hat * n_paths as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::normal::cdf;

    #[test]
    fn grid_rule_examples() {
        let rule = GridRule::InverseSqrt { m_min: 1, m_max: 4096 };
        assert_eq!(grid_points_per_unit(1.0, rule), 1);
        assert_eq!(grid_points_per_unit(0.25, rule), 4);
        assert_eq!(grid_points_per_unit(0.04, rule), 25);
        assert_eq!(grid_points_per_unit(0.5, rule), 4);
        assert_eq!(
            grid_points_per_unit(0.01, GridRule::InverseSqrt { m_min: 1, m_max: 64 }),
            64
        );
        assert_eq!(grid_points_per_unit(0.3, GridRule::Fixed { m: 7 }), 7);
        assert_eq!(
            grid_points_per_unit(0.9, GridRule::InverseSqrt { m_min: 64, m_max: 4096 }),
            64
        );
    }

    #[test]
    fn config_validation() {
        assert!(McConfig::new(99, 1).validate().is_err());
        assert!(McConfig::new(100, 1).validate().is_ok());
        let bad = McConfig::new(100, 1).with_grid(GridRule::InverseSqrt { m_min: 8, m_max: 4 });
        assert!(bad.validate().is_err());
    }

    #[test]
    fn infinite_barrier_always_survives() {
        let cfg = McConfig::new(500, 3).with_barrier(f64::INFINITY);
        for h in [0.3, 0.5, 1.0] {
            let e = estimate_persistence_fixed(h, 10.0, &cfg).unwrap();
            assert_eq!(e.p_hat, 1.0);
        }
    }

    #[test]
    fn negative_barrier_never_survives() {
        let cfg = McConfig::new(500, 3).with_barrier(-0.1);
        let e = estimate_persistence_fixed(0.7, 2.0, &cfg).unwrap();
        assert_eq!(e.p_hat, 0.0);
    }

    #[test]
    fn point_law_matches_fixed_exactly() {
        let cfg = McConfig::new(3000, 17);
        for h in [0.35, 0.5, 1.0] {
            let a = estimate_persistence_fixed(h, 8.0, &cfg).unwrap();
            let b = estimate_persistence_annealed(&HurstLaw::point(h), 8.0, &cfg).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn degenerate_passage_index_exact() {
        // Brute-force the first passage of t·ξ against the closed form.
        let cache = PlanCache::default();
        let mut s = PassageSampler::new(&cache, 5);
        for path in 0..2000 {
            let xi: f64 = stream(5, Domain::Paths, path).sample(StandardNormal);
            let (m, n, b) = (3u32, 40usize, 1.3);
            let brute = (0..=n).find(|&k| (k as f64 / m as f64) * xi > b).unwrap_or(n + 1);
            assert_eq!(s.first_passage(path, 1.0, m, n, b).unwrap(), brute, "xi={xi}");
        }
    }

    #[test]
    fn degenerate_closed_form() {
        let cfg = McConfig::new(200_000, 5);
        let e = estimate_persistence_fixed(1.0, 10.0, &cfg).unwrap();
        let exact = cdf(0.1);
        assert!((e.p_hat - exact).abs() < 4.0 * e.std_err, "{} vs {exact}", e.p_hat);
    }

    #[test]
    fn monotone_in_barrier_on_shared_seeds() {
        for h in [0.3, 0.5, 0.8] {
            let mut last = -1.0;
            for b in [0.25, 0.5, 1.0, 2.0] {
                let cfg = McConfig::new(2000, 23).with_barrier(b);
                let e = estimate_persistence_fixed(h, 16.0, &cfg).unwrap();
                assert!(e.p_hat >= last, "H={h} barrier {b}");
                last = e.p_hat;
            }
        }
    }

    #[test]
    fn monotone_in_horizon_on_nested_prefixes() {
        let cfg = McConfig::new(4000, 29);
        let ts = [1.0, 2.0, 4.0, 8.0, 16.0, 32.0];
        for law in [HurstLaw::point(0.3), HurstLaw::point(0.5), HurstLaw::uniform(0.2, 0.9)] {
            let curve = estimate_persistence_curve(&law, &ts, &cfg).unwrap();
            for w in curve.windows(2) {
                assert!(w[1].n_hits <= w[0].n_hits);
            }
        }
    }

    #[test]
    fn mgf_at_zero_is_one() {
        let cfg = McConfig::new(200, 1).with_grid(GridRule::Fixed { m: 16 });
        let e = estimate_expectation(Functional::Mgf { theta: 0.0 }, 0.4, &cfg).unwrap();
        assert_eq!(e.p_hat, 1.0);
        assert_eq!(e.std_err, 0.0);
    }

    #[test]
    fn small_barrier_large_epsilon_is_certain() {
        let cfg = McConfig::new(1000, 2);
        let e = estimate_small_barrier(&HurstLaw::point(0.6), 1e6, &cfg).unwrap();
        assert!(e.p_hat > 0.999);
    }

    #[test]
    fn exp_neg_integral_is_finite_and_bracketed() {
        let cfg = McConfig::new(20_000, 8).with_grid(GridRule::Fixed { m: 256 });
        let fs = [
            Functional::ExpNegIntegral { horizon: 1.0 },
            Functional::AbsMax01,
            Functional::Mgf { theta: 1.0 },
        ];
        let est = estimate_expectations(&fs, 0.5, &cfg).unwrap();
        let (inv, amax, mgf) = (est[0].p_hat, est[1].p_hat, est[2].p_hat);
        assert!(inv.is_finite() && inv > 0.0);
        // e^{-A} <= 1/∫₀¹e^B <= e^{A} path by path.
        assert!(inv <= mgf);
        assert!(inv >= (-amax).exp());
    }
}
