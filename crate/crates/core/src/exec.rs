//! Deterministic path-parallel execution.
//!
//! Paths are split into fixed chunks of [`CHUNK_PATHS`]; chunk results are
//! collected in chunk order and folded left, so the output is identical for
//! any worker count. Path `i` always draws from stream `i` of its domain.

use std::sync::Arc;

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::estimate::MeanStats;
use crate::paths::{build_circulant_plan, integrate_increments, CirculantSampler, GridSpec};
use crate::rng::{stream, Domain};

/// Paths per chunk. Even, so circulant pairs never straddle a chunk.
pub const CHUNK_PATHS: u64 = 4096;

pub(crate) fn run_chunks<A, F>(n_paths: u64, workers: usize, f: F) -> Result<Vec<A>>
where
    A: Send,
    F: Fn(u64, u64) -> Result<A> + Sync + Send,
{
    let n_chunks = n_paths.div_ceil(CHUNK_PATHS);
    let job = || {
        (0..n_chunks)
            .into_par_iter()
            .map(|c| f(c * CHUNK_PATHS, ((c + 1) * CHUNK_PATHS).min(n_paths)))
            .collect::<Result<Vec<A>>>()
    };
    if workers == 0 {
        job()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| Error::InvalidConfig(format!("cannot start {workers} workers: {e}")))?;
        pool.install(job)
    }
}

/// Fixed-H path job on one grid.
#[derive(Debug, Clone, Copy)]
pub(crate) struct PathJob {
    pub hurst: f64,
    pub grid: GridSpec,
    pub n_paths: u64,
    pub seed: u64,
    pub workers: usize,
}

/// Calls `visit(acc, path_index, values)` for every path and returns the
/// per-chunk accumulators in chunk order.
pub(crate) fn map_paths<A, I, F>(job: &PathJob, init: I, visit: F) -> Result<Vec<A>>
where
    A: Send,
    I: Fn() -> A + Sync + Send,
    F: Fn(&mut A, u64, &[f64]) + Sync + Send,
{
    let n = job.grid.n_points();
    let plan = if job.hurst == 1.0 {
        None
    } else {
        Some(Arc::new(build_circulant_plan(job.hurst, n)?))
    };
    let scale = job.grid.step().powf(job.hurst);
    run_chunks(job.n_paths, job.workers, |start, end| {
        let mut acc = init();
        let mut values = vec![0.0; n + 1];
        match &plan {
            None => {
                for i in start..end {
                    let xi: f64 = stream(job.seed, Domain::Paths, i).sample(StandardNormal);
                    for (k, v) in values.iter_mut().enumerate() {
                        *v = job.grid.time(k) * xi;
                    }
                    visit(&mut acc, i, &values);
                }
            }
            Some(plan) => {
                let mut sampler = CirculantSampler::new(Arc::clone(plan));
                let (mut a, mut b) = (vec![0.0; n], vec![0.0; n]);
                let mut i = start;
                while i < end {
                    let mut rng = stream(job.seed, Domain::Paths, i);
                    sampler.increments_pair(&mut rng, &mut a, &mut b);
                    integrate_increments(&a, scale, &mut values);
                    visit(&mut acc, i, &values);
                    if i + 1 < end {
                        integrate_increments(&b, scale, &mut values);
                        visit(&mut acc, i + 1, &values);
                    }
                    i += 2;
                }
            }
        }
        Ok(acc)
    })
}

/// Means of `k` per-path statistics computed by `stat(values, out)`.
pub(crate) fn path_means<F>(job: &PathJob, k: usize, stat: F) -> Result<Vec<MeanStats>>
where
    F: Fn(&[f64], &mut [f64]) + Sync + Send,
{
    let chunks = map_paths(
        job,
        || (vec![MeanStats::default(); k], vec![0.0; k]),
        |(acc, out), _, values| {
            stat(values, out);
            for (a, &x) in acc.iter_mut().zip(out.iter()) {
                a.push(x);
            }
        },
    )?;
    let mut total = vec![MeanStats::default(); k];
    for (chunk, _) in &chunks {
        for (t, c) in total.iter_mut().zip(chunk) {
            t.merge(c);
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chunk_results_independent_of_workers() {
        let job = PathJob {
            hurst: 0.7,
            grid: GridSpec::new(4.0, 4).unwrap(),
            n_paths: 10_001,
            seed: 9,
            workers: 1,
        };
        let stat = |v: &[f64], out: &mut [f64]| {
            out[0] = v[v.len() - 1];
            out[1] = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        };
        let a = path_means(&job, 2, stat).unwrap();
        let b = path_means(&PathJob { workers: 3, ..job }, 2, stat).unwrap();
        assert_eq!(a, b);
        assert_eq!(a[0].n, 10_001);
    }
}
