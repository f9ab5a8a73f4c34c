use std::sync::Arc;

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::circulant::{build_circulant_plan, integrate_increments, CirculantSampler};
use super::grid::GridSpec;
use crate::error::{Error, Result};

/// Largest number of random grid points the dense Cholesky oracle accepts.
pub const CHOLESKY_MAX_POINTS: usize = 4096;

/// A sampled trajectory on a uniform grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Path {
    pub hurst: f64,
    pub grid: GridSpec,
    pub values: Vec<f64>,
}

impl Path {
    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.values.len()).map(|k| self.grid.time(k))
    }
}

/// FBM covariance `½(t^{2H} + s^{2H} − |t−s|^{2H})`, extended to `H = 1`
/// where it reduces to `s·t`.
pub fn fbm_cov(hurst: f64, s: f64, t: f64) -> f64 {
    if hurst == 1.0 {
        return s * t;
    }
    let two_h = 2.0 * hurst;
    0.5 * (s.abs().powf(two_h) + t.abs().powf(two_h) - (t - s).abs().powf(two_h))
}

/// Exact FBM path by circulant embedding of unit-step fGn, rescaled to the
/// grid step through self-similarity.
pub fn sample_fbm_path<R: Rng + ?Sized>(hurst: f64, grid: &GridSpec, rng: &mut R) -> Result<Path> {
    if !(hurst > 0.0 && hurst < 1.0) {
        return Err(Error::Domain(format!("sample_fbm_path needs 0 < H < 1, got {hurst}")));
    }
    let n = grid.n_points();
    let plan = Arc::new(build_circulant_plan(hurst, n)?);
    let mut sampler = CirculantSampler::new(plan);
    let mut inc = vec![0.0; n];
    sampler.increments(rng, &mut inc);
    let mut values = vec![0.0; n + 1];
    integrate_increments(&inc, grid.step().powf(hurst), &mut values);
    Ok(Path {
        hurst,
        grid: *grid,
        values,
    })
}

/// The `H = 1` process `t·ξ` with one standard normal `ξ`.
pub fn sample_degenerate_h1<R: Rng + ?Sized>(grid: &GridSpec, rng: &mut R) -> Path {
    let xi: f64 = rng.sample(StandardNormal);
    degenerate_path(grid, xi)
}

pub(crate) fn degenerate_path(grid: &GridSpec, xi: f64) -> Path {
    let values = (0..=grid.n_points()).map(|k| grid.time(k) * xi).collect();
    Path {
        hurst: 1.0,
        grid: *grid,
        values,
    }
}

/// Samples any `H ∈ (0, 1]`, routing `H = 1` to the degenerate process.
pub fn sample_path<R: Rng + ?Sized>(hurst: f64, grid: &GridSpec, rng: &mut R) -> Result<Path> {
    if hurst == 1.0 {
        Ok(sample_degenerate_h1(grid, rng))
    } else {
        sample_fbm_path(hurst, grid, rng)
    }
}

/// Dense-factorization sampler: `values[1..] = L·z` with `L Lᵀ` the FBM
/// covariance on the grid.
#[derive(Debug, Clone)]
pub struct CholeskySampler {
    hurst: f64,
    grid: GridSpec,
    factor: DMatrix<f64>,
}

impl CholeskySampler {
    pub fn new(hurst: f64, grid: &GridSpec) -> Result<Self> {
        if !(hurst > 0.0 && hurst < 1.0) {
            return Err(Error::Domain(format!("Cholesky sampler needs 0 < H < 1, got {hurst}")));
        }
        let n = grid.n_points();
        if n > CHOLESKY_MAX_POINTS {
            return Err(Error::SizeExceeded {
                size: n,
                cap: CHOLESKY_MAX_POINTS,
            });
        }
        let cov = DMatrix::from_fn(n, n, |i, j| fbm_cov(hurst, grid.time(i + 1), grid.time(j + 1)));
        let factor = cov
            .cholesky()
            .ok_or(Error::FactorizationFailed { hurst, n_points: n })?
            .unpack();
        Ok(Self {
            hurst,
            grid: *grid,
            factor,
        })
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Path {
        let n = self.grid.n_points();
        let z: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        let mut values = vec![0.0; n + 1];
        for i in 0..n {
            let row = self.factor.row(i);
            let mut acc = 0.0;
            for j in 0..=i {
                acc += row[j] * z[j];
            }
            values[i + 1] = acc;
        }
        Path {
            hurst: self.hurst,
            grid: self.grid,
            values,
        }
    }
}

pub fn sample_fbm_cholesky<R: Rng + ?Sized>(hurst: f64, grid: &GridSpec, rng: &mut R) -> Result<Path> {
    Ok(CholeskySampler::new(hurst, grid)?.sample(rng))
}
