//! Sampler throughput: circulant embedding against dense Cholesky.

use std::path::Path;
use std::sync::Arc;
use std::time::Instant;

use serde::Serialize;
use serde_json::json;

use super::config::BenchSection;
use super::output::RunManifest;
use crate::error::{Error, Result};
use crate::paths::{
    build_circulant_plan, integrate_increments, CholeskySampler, CirculantSampler, GridSpec, CHOLESKY_MAX_POINTS,
};
use crate::rng::{stream, Domain};

/// Sizes at and above which circulant sampling must be faster.
pub const BENCH_ASSERT_MIN_N: usize = 4096;

#[derive(Debug, Clone, Serialize)]
pub struct BenchRow {
    pub sampler: &'static str,
    pub hurst: f64,
    pub n: usize,
    pub paths: u64,
    pub setup_s: f64,
    pub sample_s: f64,
    pub paths_per_s: f64,
    /// Sum of all sampled values; reproducible for a fixed seed.
    pub checksum: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
    /// `(hurst, n, circulant faster)` for every asserted size.
    pub assertions: Vec<(f64, usize, bool)>,
    pub all_passed: bool,
}

fn bench_circulant(hurst: f64, n: usize, paths: u64, seed: u64) -> Result<BenchRow> {
    let grid = GridSpec::unit(n as u32)?;
    let t0 = Instant::now();
    let plan = Arc::new(build_circulant_plan(hurst, n)?);
    let setup_s = t0.elapsed().as_secs_f64();
    let mut sampler = CirculantSampler::new(plan);
    let scale = grid.step().powf(hurst);
    let (mut a, mut b, mut values) = (vec![0.0; n], vec![0.0; n], vec![0.0; n + 1]);
    let mut checksum = 0.0;
    let t1 = Instant::now();
    let mut i = 0;
    while i < paths {
        sampler.increments_pair(&mut stream(seed, Domain::Paths, i), &mut a, &mut b);
        integrate_increments(&a, scale, &mut values);
        checksum += values.iter().sum::<f64>();
        if i + 1 < paths {
            integrate_increments(&b, scale, &mut values);
            checksum += values.iter().sum::<f64>();
        }
        i += 2;
    }
    let sample_s = t1.elapsed().as_secs_f64();
    Ok(BenchRow {
        sampler: "circulant",
        hurst,
        n,
        paths,
        setup_s,
        sample_s,
        paths_per_s: paths as f64 / sample_s,
        checksum,
    })
}

fn bench_cholesky(hurst: f64, n: usize, paths: u64, seed: u64) -> Result<Option<BenchRow>> {
    if n > CHOLESKY_MAX_POINTS {
        return Ok(None);
    }
    let grid = GridSpec::unit(n as u32)?;
    let t0 = Instant::now();
    let sampler = CholeskySampler::new(hurst, &grid)?;
    let setup_s = t0.elapsed().as_secs_f64();
    let mut checksum = 0.0;
    let t1 = Instant::now();
    for i in 0..paths {
        checksum += sampler
            .sample(&mut stream(seed, Domain::Paths, i))
            .values
            .iter()
            .sum::<f64>();
    }
    let sample_s = t1.elapsed().as_secs_f64();
    Ok(Some(BenchRow {
        sampler: "cholesky",
        hurst,
        n,
        paths,
        setup_s,
        sample_s,
        paths_per_s: paths as f64 / sample_s,
        checksum,
    }))
}

pub fn cmd_bench(sec: &BenchSection, seed: u64, out: &Path) -> Result<BenchReport> {
    if sec.paths == 0 || sec.hursts.is_empty() || sec.sizes.is_empty() {
        return Err(Error::InvalidConfig(
            "bench needs paths >= 1 and nonempty hurst and size grids".into(),
        ));
    }
    if let Some(h) = sec.hursts.iter().find(|&&h| !(h > 0.0 && h < 1.0)) {
        return Err(Error::InvalidConfig(format!("bench hurst must be in (0,1), got {h}")));
    }
    std::fs::create_dir_all(out)?;
    let mut manifest = RunManifest::new("bench", json!({"section": sec, "seed": seed}));
    let mut rows = Vec::new();
    let mut assertions = Vec::new();
    manifest.stage("bench", || {
        for &h in &sec.hursts {
            for &n in &sec.sizes {
                let c = bench_circulant(h, n, sec.paths, seed)?;
                let d = bench_cholesky(h, n, sec.paths, seed)?;
                if n >= BENCH_ASSERT_MIN_N {
                    if let Some(d) = &d {
                        assertions.push((h, n, c.paths_per_s > d.paths_per_s));
                    }
                }
                rows.push(c);
                rows.extend(d);
            }
        }
        Ok(())
    })?;
    let path = out.join("bench.csv");
    let mut w = csv::Writer::from_path(&path)?;
    w.write_record([
        "sampler",
        "hurst",
        "n",
        "paths",
        "setup_s",
        "sample_s",
        "paths_per_s",
        "checksum",
    ])?;
    for r in &rows {
        w.write_record([
            r.sampler.to_string(),
            r.hurst.to_string(),
            r.n.to_string(),
            r.paths.to_string(),
            r.setup_s.to_string(),
            r.sample_s.to_string(),
            r.paths_per_s.to_string(),
            r.checksum.to_string(),
        ])?;
    }
    w.flush()?;
    manifest.add_output(&path)?;
    manifest.write(out)?;
    println!(
        "{:<10} {:>5} {:>7} {:>12} {:>14} {:>22}",
        "sampler", "H", "n", "setup_s", "paths/s", "checksum"
    );
    for r in &rows {
        println!(
            "{:<10} {:>5} {:>7} {:>12.4e} {:>14.1} {:>22}",
            r.sampler, r.hurst, r.n, r.setup_s, r.paths_per_s, r.checksum
        );
    }
    for &n in &sec.sizes {
        if n > CHOLESKY_MAX_POINTS {
            println!("cholesky n/a at n={n} (cap {CHOLESKY_MAX_POINTS})");
        }
    }
    for (h, n, ok) in &assertions {
        println!(
            "{} circulant faster than cholesky at H={h}, n={n}",
            if *ok { "PASS" } else { "FAIL" }
        );
    }
    let all_passed = assertions.iter().all(|a| a.2);
    Ok(BenchReport {
        rows,
        assertions,
        all_passed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn checksums_reproducible() {
        let a = bench_circulant(0.7, 64, 10, 5).unwrap();
        let b = bench_circulant(0.7, 64, 10, 5).unwrap();
        assert_eq!(a.checksum, b.checksum);
        let c = bench_cholesky(0.7, 64, 10, 5).unwrap().unwrap();
        let d = bench_cholesky(0.7, 64, 10, 5).unwrap().unwrap();
        assert_eq!(c.checksum, d.checksum);
        assert!(bench_cholesky(0.7, CHOLESKY_MAX_POINTS + 1, 1, 5).unwrap().is_none());
    }
}
