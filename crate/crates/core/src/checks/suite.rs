//! The verify suite: every check at default sizes, with name filtering.

use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::*;
use crate::error::{Error, Result};
use crate::exec::{map_paths, PathJob};
use crate::paths::GridSpec;
use crate::persistence::{GridRule, McConfig};
use crate::rng::derive_seed;

/// Check names accepted by [`run_verify`], in execution order.
pub const CHECK_NAMES: &[&str] = &[
    "expected_max",
    "mgf",
    "discretization",
    "slepian",
    "statement1",
    "records",
    "negative_barrier",
    "bz_covariance",
    "extreme_value",
    "mills",
    "rkhs",
    "monotonicity_probe",
];

fn default_n_paths() -> u64 {
    100_000
}

fn default_expectation_grid() -> u32 {
    1024
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VerifyConfig {
    pub seed: u64,
    /// Paths per statistical check.
    #[serde(default = "default_n_paths")]
    pub n_paths: u64,
    /// Grid points per unit for expectations on `[0, 1]`.
    #[serde(default = "default_expectation_grid")]
    pub expectation_grid: u32,
    #[serde(default)]
    pub workers: usize,
}

impl VerifyConfig {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            n_paths: default_n_paths(),
            expectation_grid: default_expectation_grid(),
            workers: 0,
        }
    }

    fn mc(&self, check: &str, label: &str) -> McConfig {
        McConfig::new(self.n_paths, derive_seed(derive_seed(self.seed, check), label)).with_workers(self.workers)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckEntry {
    pub group: String,
    pub name: String,
    pub inputs: Value,
    pub lhs: f64,
    pub rhs: f64,
    pub lhs_se: f64,
    pub rhs_se: f64,
    pub margin: f64,
    pub pass: bool,
    pub wall_time_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckTable {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub config: VerifyConfig,
    pub entries: Vec<CheckEntry>,
    pub tables: Vec<CheckTable>,
    pub findings: Vec<String>,
    pub all_passed: bool,
}

struct Collector {
    entries: Vec<CheckEntry>,
    tables: Vec<CheckTable>,
    findings: Vec<String>,
}

impl Collector {
    fn push(&mut self, group: &str, inputs: Value, c: BoundCheck, started: Instant) {
        log::info!("{group}: {} pass={} margin={:.4e}", c.name, c.pass, c.margin);
        self.entries.push(CheckEntry {
            group: group.to_string(),
            name: c.name,
            inputs,
            lhs: c.lhs,
            rhs: c.rhs,
            lhs_se: c.lhs_se,
            rhs_se: c.rhs_se,
            margin: c.margin,
            pass: c.pass,
            wall_time_s: started.elapsed().as_secs_f64(),
        });
    }

    fn table(&mut self, name: String, columns: &[&str], rows: Vec<Vec<f64>>) {
        self.tables.push(CheckTable {
            name,
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows,
        });
    }
}

/// Resolves a filter into check names; `None` or an empty filter selects all.
pub fn select_checks(filter: Option<&[String]>) -> Result<Vec<&'static str>> {
    let Some(filter) = filter.filter(|f| !f.is_empty()) else {
        return Ok(CHECK_NAMES.to_vec());
    };
    for name in filter {
        if !CHECK_NAMES.contains(&name.as_str()) {
            return Err(Error::InvalidConfig(format!(
                "unknown check '{name}'; valid checks: {}",
                CHECK_NAMES.join(", ")
            )));
        }
    }
    Ok(CHECK_NAMES
        .iter()
        .copied()
        .filter(|n| filter.iter().any(|f| f == n))
        .collect())
}

pub fn run_verify(cfg: &VerifyConfig, filter: Option<&[String]>) -> Result<VerifyReport> {
    let selected = select_checks(filter)?;
    let mut out = Collector {
        entries: Vec::new(),
        tables: Vec::new(),
        findings: Vec::new(),
    };
    for name in selected {
        log::info!("running check group {name}");
        run_group(name, cfg, &mut out)?;
    }
    let all_passed = out.entries.iter().all(|e| e.pass);
    Ok(VerifyReport {
        config: *cfg,
        entries: out.entries,
        tables: out.tables,
        findings: out.findings,
        all_passed,
    })
}

fn run_group(name: &str, cfg: &VerifyConfig, out: &mut Collector) -> Result<()> {
    let grid = GridRule::Fixed {
        m: cfg.expectation_grid,
    };
    match name {
        "expected_max" => {
            for i in 1..=9 {
                let h = f64::from(i) / 10.0;
                let t = Instant::now();
                let mc = cfg.mc(name, &format!("H={h}")).with_grid(grid);
                for c in check_expected_max_bounds(h, &mc)? {
                    out.push(name, json!({"hurst": h, "grid": cfg.expectation_grid}), c, t);
                }
            }
        }
        "mgf" => {
            for (h, theta) in [(0.5, 1.0), (0.1, 2.0), (0.8, 0.5), (0.3, 4.0)] {
                let t = Instant::now();
                let mc = cfg.mc(name, &format!("H={h},theta={theta}")).with_grid(grid);
                let c = check_mgf_bound(h, theta, &mc)?;
                out.push(
                    name,
                    json!({"hurst": h, "theta": theta, "grid": cfg.expectation_grid}),
                    c,
                    t,
                );
            }
        }
        "discretization" => {
            for h in [0.3, 0.5, 0.8] {
                let t = Instant::now();
                let ns: Vec<u32> = [16u32, 64, 256]
                    .into_iter()
                    .filter(|&n| f64::from(n) >= 2f64.powf(1.0 / h))
                    .collect();
                let checks = check_discretization_errors(h, &ns, &cfg.mc(name, &format!("H={h}")))?;
                for d in checks {
                    out.push(name, json!({"hurst": h, "n": d.n_grid}), d.check, t);
                    out.push(
                        name,
                        json!({"hurst": h, "n": d.n_grid}),
                        BoundCheck::exact(
                            format!("discretization_gap_nonnegative(H={h},n={})", d.n_grid),
                            0.0,
                            d.min_path_gap,
                            0.0,
                        ),
                        t,
                    );
                }
            }
        }
        "slepian" => {
            let (eps, hs) = (0.5, [0.3, 0.5, 0.7]);
            let t = Instant::now();
            let r = check_slepian_monotonicity(eps, &hs, &cfg.mc(name, "grid"))?;
            out.table(
                format!("slepian(eps={eps})"),
                &["hurst", "p_hat", "std_err", "ci_lo", "ci_hi"],
                r.rows
                    .iter()
                    .map(|row| {
                        let e = row.estimate;
                        vec![row.hurst, e.p_hat, e.std_err, e.ci_lo, e.ci_hi]
                    })
                    .collect(),
            );
            for c in r.pairs {
                out.push(name, json!({"epsilon": eps, "h_grid": hs}), c, t);
            }
        }
        "statement1" => {
            let ts = [4.0, 16.0, 64.0, 256.0];
            for h in [0.4, 0.6] {
                let t = Instant::now();
                let r = check_statement1(h, &ts, &cfg.mc(name, &format!("H={h}")).with_grid(grid))?;
                out.table(
                    format!("statement1(H={h})"),
                    &["horizon", "g_hat", "std_err", "ci_lo", "ci_hi"],
                    r.rows
                        .iter()
                        .map(|row| {
                            let g = row.g_hat;
                            vec![row.horizon, g.p_hat, g.std_err, g.ci_lo, g.ci_hi]
                        })
                        .collect(),
                );
                let (first, last) = (r.rows[0].g_hat, r.rows[r.rows.len() - 1].g_hat);
                let c = BoundCheck::with_slack(
                    format!("statement1_shrinkage(H={h})"),
                    last.p_hat.abs() + last.half_width(),
                    last.std_err,
                    first.p_hat.abs() - first.half_width(),
                    first.std_err,
                    0.0,
                );
                let mut c = c;
                c.pass = r.pass;
                out.push(
                    name,
                    json!({"hurst": h, "horizons": ts, "grid": cfg.expectation_grid}),
                    c,
                    t,
                );
            }
        }
        "records" => {
            for h in [0.3, 0.5, 0.7] {
                let t = Instant::now();
                let r = count_right_to_left_records(h, 30, &cfg.mc(name, &format!("H={h}")))?;
                out.push(name, json!({"hurst": h, "n": 30}), r.check, t);
            }
            let t = Instant::now();
            let mismatches = records_brute_force_mismatches(cfg)?;
            out.push(
                name,
                json!({"hurst": 0.5, "n": 10, "paths": 200}),
                BoundCheck::exact("records_scan_equals_brute_force", mismatches as f64, 0.0, 0.0),
                t,
            );
        }
        "negative_barrier" => {
            for h in [0.3, 0.5, 0.8] {
                for (n, m) in [(2usize, 1u32), (16, 2), (16, 8)] {
                    let t = Instant::now();
                    let c = check_negative_barrier_bound(h, n, m, &cfg.mc(name, &format!("H={h},n={n},m={m}")))?;
                    out.push(name, json!({"hurst": h, "n": n, "m": m}), c, t);
                }
            }
        }
        "bz_covariance" => {
            for h in [0.1, 0.3, 0.5, 0.7, 0.9] {
                let t = Instant::now();
                let n = 64;
                let mut worst = f64::NEG_INFINITY;
                let mut var_gap: f64 = 0.0;
                for k in 1..=n {
                    for l in 1..=n {
                        let (f, x) = bz_comparison_cov(h, n, k, l)?;
                        worst = worst.max(x - f);
                        if k == l {
                            var_gap = var_gap.max((f - x).abs());
                        }
                    }
                }
                out.push(
                    name,
                    json!({"hurst": h, "n": n}),
                    BoundCheck::exact(format!("bz_cov_order(H={h})"), worst, 0.0, 1e-12),
                    t,
                );
                out.push(
                    name,
                    json!({"hurst": h, "n": n}),
                    BoundCheck::exact(format!("bz_var_equal(H={h})"), var_gap, 0.0, 1e-12),
                    t,
                );
            }
        }
        "extreme_value" => {
            let mut rows = Vec::new();
            for n in [16u64, 100, 1000] {
                let t = Instant::now();
                let seed = derive_seed(derive_seed(cfg.seed, name), &format!("n={n}"));
                let r = extreme_value_mc(n, cfg.n_paths, seed, cfg.workers)?;
                rows.push(vec![
                    n as f64,
                    r.a_n,
                    r.b_n,
                    r.estimate.p_hat,
                    r.estimate.std_err,
                    r.exact,
                    r.distance_to_limit,
                ]);
                out.push(name, json!({"n": n, "trials": cfg.n_paths}), r.check, t);
            }
            out.table(
                "extreme_value".into(),
                &["n", "a_n", "b_n", "p_hat", "std_err", "exact", "distance_to_limit"],
                rows,
            );
        }
        "mills" => {
            let t = Instant::now();
            let xs: Vec<f64> = (0..=20).map(|i| f64::from(i) * 0.5).chain([15.0, 20.0, 30.0]).collect();
            let rows = mills_ratio_check(&xs)?;
            for r in &rows {
                out.push(
                    name,
                    json!({"x": r.x}),
                    BoundCheck::exact(format!("mills_lower(x={})", r.x), r.lower, r.tail, EXACT_TOL),
                    t,
                );
                if let Some(u) = r.upper {
                    out.push(
                        name,
                        json!({"x": r.x}),
                        BoundCheck::exact(format!("mills_upper(x={})", r.x), r.tail, u, EXACT_TOL),
                        t,
                    );
                }
            }
            out.table(
                "mills".into(),
                &["x", "lower", "tail", "upper", "bound_ratio"],
                rows.iter()
                    .map(|r| {
                        vec![
                            r.x,
                            r.lower,
                            r.tail,
                            r.upper.unwrap_or(f64::NAN),
                            r.bound_ratio.unwrap_or(f64::NAN),
                        ]
                    })
                    .collect(),
            );
        }
        "rkhs" => {
            for h in [0.05, 0.1, 0.3, 0.5, 0.7, 0.9, 1.0] {
                for (n, m) in [(4usize, 2usize), (8, 1), (64, 16), (1000, 4)] {
                    let t = Instant::now();
                    let q = rkhs_shift_quantities(h, n, m)?;
                    let inputs = json!({"hurst": h, "n": n, "m": m});
                    out.push(
                        name,
                        inputs.clone(),
                        BoundCheck::exact(format!("rkhs_kappa(H={h},n={n},m={m})"), 0.5, q.kappa, 1e-12),
                        t,
                    );
                    out.push(
                        name,
                        inputs.clone(),
                        BoundCheck::exact(format!("rkhs_f_min(H={h},n={n},m={m})"), 2.0, q.f_min, 1e-12),
                        t,
                    );
                    out.push(
                        name,
                        inputs,
                        BoundCheck::exact(format!("rkhs_norm(H={h},n={n},m={m})"), q.f_norm_sq, 16.0, EXACT_TOL),
                        t,
                    );
                }
            }
        }
        "monotonicity_probe" => {
            let hs: Vec<f64> = (1..=9).map(|i| f64::from(i) / 10.0).collect();
            for horizon in [1.0, 64.0] {
                let p = probe_monotonicity_conjecture(horizon, &hs, &cfg.mc(name, &format!("T={horizon}")))?;
                out.table(
                    format!("monotonicity_probe(T={horizon})"),
                    &["hurst", "p_hat", "std_err", "ci_lo", "ci_hi"],
                    p.rows
                        .iter()
                        .map(|row| {
                            let e = row.estimate;
                            vec![row.hurst, e.p_hat, e.std_err, e.ci_lo, e.ci_hi]
                        })
                        .collect(),
                );
                out.findings.extend(p.findings);
            }
        }
        other => unreachable!("unvalidated check name {other}"),
    }
    Ok(())
}

/// Scan-versus-brute-force disagreements on simulated unit-step paths.
fn records_brute_force_mismatches(cfg: &VerifyConfig) -> Result<u64> {
    let n = 10;
    let job = PathJob {
        hurst: 0.5,
        grid: GridSpec::new((n + n * n) as f64, 1)?,
        n_paths: 200,
        seed: derive_seed(cfg.seed, "records/brute_force"),
        workers: cfg.workers,
    };
    let chunks = map_paths(
        &job,
        || 0u64,
        |bad, _, values| {
            if count_records(values, n * n) != count_records_brute_force(values, n * n) {
                *bad += 1;
            }
        },
    )?;
    Ok(chunks.iter().sum())
}
