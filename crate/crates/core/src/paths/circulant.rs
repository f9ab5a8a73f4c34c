//! Circulant embedding of fractional Gaussian noise.
//!
//! The unit-step fGn autocovariance is wrapped onto a ring of even length,
//! diagonalised by one FFT, and sampled by a second FFT of complex white
//! noise weighted with the square-root spectrum. The real and imaginary
//! parts of that transform are two independent exact fGn draws.

use std::fmt;
use std::sync::Arc;

use rand::Rng;
use rand_distr::StandardNormal;
use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

/// Relative tolerance below which negative eigenvalues are treated as
/// floating-point dust and clipped to zero.
pub const EIGEN_CLIP_TOL: f64 = 1e-9;

/// Supported Hurst range for the circulant builder.
pub const MIN_PLAN_HURST: f64 = 1e-3;
pub const MAX_PLAN_HURST: f64 = 1.0 - 1e-9;

/// Autocovariance of unit-step fGn at `lag`:
/// `½(|k+1|^{2H} − 2|k|^{2H} + |k−1|^{2H})`.
pub fn fgn_autocov(hurst: f64, lag: u64) -> Result<f64> {
    if !(hurst > 0.0 && hurst < 1.0) {
        return Err(Error::Domain(format!(
            "fGn autocovariance needs 0 < H < 1, got {hurst}"
        )));
    }
    Ok(autocov_unchecked(hurst, lag))
}

pub(crate) fn autocov_unchecked(hurst: f64, lag: u64) -> f64 {
    if lag == 0 {
        return 1.0;
    }
    let two_h = 2.0 * hurst;
    let k = lag as f64;
    0.5 * ((k + 1.0).powf(two_h) - 2.0 * k.powf(two_h) + (k - 1.0).powf(two_h))
}

/// Smallest `2^a·3^b·5^c` that is `>= n`.
pub(crate) fn smooth_size(n: usize) -> usize {
    let n = n.max(1);
    let mut best = n.next_power_of_two();
    let mut p5 = 1usize;
    while p5 < best {
        let mut p35 = p5;
        while p35 < best {
            let mut v = p35;
            while v < n {
                v *= 2;
            }
            best = best.min(v);
            p35 *= 3;
        }
        p5 *= 5;
    }
    best
}

/// Eigenvalues of the circulant embedding of unit-step fGn for one `(H, n)`.
pub struct CirculantPlan {
    hurst: f64,
    n_increments: usize,
    eigenvalues: Vec<f64>,
    clipped_mass: f64,
    weights: Vec<f64>,
    white: bool,
    fft: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for CirculantPlan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CirculantPlan")
            .field("hurst", &self.hurst)
            .field("n_increments", &self.n_increments)
            .field("embedding_len", &self.eigenvalues.len())
            .field("clipped_mass", &self.clipped_mass)
            .field("white", &self.white)
            .finish()
    }
}

/// Builds the plan for `n_increments` unit-step increments.
///
/// The ring has length `2·N` with `N` the smallest 5-smooth integer
/// `>= n_increments`; samples of the longer sequence are truncated.
pub fn build_circulant_plan(hurst: f64, n_increments: usize) -> Result<CirculantPlan> {
    if !(MIN_PLAN_HURST..=MAX_PLAN_HURST).contains(&hurst) {
        return Err(Error::Domain(format!(
            "circulant plan supports H in [{MIN_PLAN_HURST}, {MAX_PLAN_HURST}], got {hurst}"
        )));
    }
    if n_increments == 0 {
        return Err(Error::Domain("circulant plan needs at least one increment".into()));
    }
    let half = smooth_size(n_increments);
    let len = 2 * half;

    let mut ring = vec![Complex::new(0.0, 0.0); len];
    for k in 0..=half {
        let g = autocov_unchecked(hurst, k as u64);
        ring[k].re = g;
        if k > 0 && k < half {
            ring[len - k].re = g;
        }
    }
    let white = ring[1..].iter().all(|c| c.re == 0.0);

    let fft = FftPlanner::new().plan_fft_forward(len);
    fft.process(&mut ring);

    let max = ring.iter().map(|c| c.re).fold(f64::NEG_INFINITY, f64::max);
    let min = ring.iter().map(|c| c.re).fold(f64::INFINITY, f64::min);
    if min < -EIGEN_CLIP_TOL * max {
        return Err(Error::EmbeddingNotPsd { min, max });
    }
    let mut clipped_mass = 0.0;
    let eigenvalues: Vec<f64> = ring
        .iter()
        .map(|c| {
            if c.re < 0.0 {
                clipped_mass -= c.re;
                0.0
            } else {
                c.re
            }
        })
        .collect();
    let weights = eigenvalues.iter().map(|&l| (l / len as f64).sqrt()).collect();

    Ok(CirculantPlan {
        hurst,
        n_increments,
        eigenvalues,
        clipped_mass,
        weights,
        white,
        fft,
    })
}

impl CirculantPlan {
    pub fn hurst(&self) -> f64 {
        self.hurst
    }

    pub fn n_increments(&self) -> usize {
        self.n_increments
    }

    pub fn embedding_len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn clipped_mass(&self) -> f64 {
        self.clipped_mass
    }

    /// True when the increments are uncorrelated (H = 1/2); sampling then
    /// skips the transform and draws i.i.d. normals directly.
    pub fn is_white(&self) -> bool {
        self.white
    }
}

/// Per-thread sampling state around a shared plan.
pub struct CirculantSampler {
    plan: Arc<CirculantPlan>,
    buf: Vec<Complex<f64>>,
    scratch: Vec<Complex<f64>>,
}

impl CirculantSampler {
    pub fn new(plan: Arc<CirculantPlan>) -> Self {
        let (buf, scratch) = if plan.white {
            (Vec::new(), Vec::new())
        } else {
            (
                vec![Complex::new(0.0, 0.0); plan.embedding_len()],
                vec![Complex::new(0.0, 0.0); plan.fft.get_inplace_scratch_len()],
            )
        };
        Self { plan, buf, scratch }
    }

    pub fn plan(&self) -> &Arc<CirculantPlan> {
        &self.plan
    }

    /// Fills `a` and `b` (each `n_increments` long) with two independent
    /// unit-step fGn sequences.
    pub fn increments_pair<R: Rng + ?Sized>(&mut self, rng: &mut R, a: &mut [f64], b: &mut [f64]) {
        let n = self.plan.n_increments;
        debug_assert!(a.len() == n && b.len() == n);
        if self.plan.white {
            for x in a.iter_mut().chain(b.iter_mut()) {
                *x = rng.sample(StandardNormal);
            }
            return;
        }
        self.transform(rng);
        for k in 0..n {
            a[k] = self.buf[k].re;
            b[k] = self.buf[k].im;
        }
    }

    /// Fills `out` with one fGn sequence.
    pub fn increments<R: Rng + ?Sized>(&mut self, rng: &mut R, out: &mut [f64]) {
        let n = self.plan.n_increments;
        debug_assert_eq!(out.len(), n);
        if self.plan.white {
            for x in out.iter_mut() {
                *x = rng.sample(StandardNormal);
            }
            return;
        }
        self.transform(rng);
        for (o, z) in out.iter_mut().zip(&self.buf) {
            *o = z.re;
        }
    }

    fn transform<R: Rng + ?Sized>(&mut self, rng: &mut R) {
        for (z, &w) in self.buf.iter_mut().zip(&self.plan.weights) {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            *z = Complex::new(w * re, w * im);
        }
        self.plan.fft.process_with_scratch(&mut self.buf, &mut self.scratch);
    }
}

/// Cumulative sum of increments scaled by `step^H`, with a leading zero.
pub(crate) fn integrate_increments(increments: &[f64], scale: f64, out: &mut [f64]) {
    debug_assert_eq!(out.len(), increments.len() + 1);
    out[0] = 0.0;
    let mut acc = 0.0;
    for (o, &dx) in out[1..].iter_mut().zip(increments) {
        acc += dx * scale;
        *o = acc;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{stream, Domain};
    use approx::assert_relative_eq;
    use nalgebra::{DMatrix, SymmetricEigen};

    #[test]
    fn autocov_examples() {
        assert_eq!(fgn_autocov(0.5, 1).unwrap(), 0.0);
        assert_eq!(fgn_autocov(0.3, 0).unwrap(), 1.0);
        assert_eq!(fgn_autocov(0.9, 0).unwrap(), 1.0);
        assert_relative_eq!(fgn_autocov(0.75, 1).unwrap(), 0.414_213_6, epsilon = 1e-7);
        assert!(fgn_autocov(1.0, 1).is_err());
        assert!(fgn_autocov(0.0, 1).is_err());
    }

    #[test]
    fn smooth_sizes() {
        assert_eq!(smooth_size(1), 1);
        assert_eq!(smooth_size(7), 8);
        assert_eq!(smooth_size(8), 8);
        assert_eq!(smooth_size(11), 12);
        assert_eq!(smooth_size(724), 729);
        assert_eq!(smooth_size(4096), 4096);
        assert_eq!(smooth_size(11586), 11664);
        for n in 1..3000 {
            let s = smooth_size(n);
            assert!(s >= n);
            let mut r = s;
            for p in [2, 3, 5] {
                while r.is_multiple_of(p) {
                    r /= p;
                }
            }
            assert_eq!(r, 1, "{s} is not 5-smooth");
        }
    }

    #[test]
    fn white_noise_spectrum_is_flat() {
        let plan = build_circulant_plan(0.5, 4).unwrap();
        assert!(plan.is_white());
        for &l in plan.eigenvalues() {
            assert!((l - 1.0).abs() <= EIGEN_CLIP_TOL);
        }
    }

    #[test]
    fn eigenvalues_nonnegative_for_long_embedding() {
        let plan = build_circulant_plan(0.7, 1024).unwrap();
        assert!(plan.eigenvalues().iter().all(|&l| l >= 0.0));
        assert!(plan.clipped_mass() <= EIGEN_CLIP_TOL * plan.eigenvalues().iter().cloned().fold(0.0, f64::max));
    }

    /// Direct O(L²) DFT of the ring, hand-expanded.
    fn direct_dft_eigenvalues(hurst: f64, half: usize) -> Vec<f64> {
        let len = 2 * half;
        let ring: Vec<f64> = (0..len)
            .map(|j| {
                let lag = if j <= half { j } else { len - j };
                autocov_unchecked(hurst, lag as u64)
            })
            .collect();
        (0..len)
            .map(|k| {
                ring.iter()
                    .enumerate()
                    .map(|(j, &c)| c * (2.0 * std::f64::consts::PI * (j * k) as f64 / len as f64).cos())
                    .sum()
            })
            .collect()
    }

    #[test]
    fn eigenvalues_match_direct_dft() {
        let plan = build_circulant_plan(0.7, 8).unwrap();
        let direct = direct_dft_eigenvalues(0.7, 8);
        for (a, b) in plan.eigenvalues().iter().zip(&direct) {
            assert_relative_eq!(*a, *b, epsilon = 1e-12, max_relative = 1e-10);
        }
    }

    #[test]
    fn eigenvalues_match_dense_eigensolver() {
        let plan = build_circulant_plan(0.3, 8).unwrap();
        let len = plan.embedding_len();
        assert_eq!(len, 16);
        let half = len / 2;
        let c = DMatrix::from_fn(len, len, |i, j| {
            let d = (i as isize - j as isize).rem_euclid(len as isize) as usize;
            let lag = if d <= half { d } else { len - d };
            autocov_unchecked(0.3, lag as u64)
        });
        let mut dense: Vec<f64> = SymmetricEigen::new(c).eigenvalues.iter().cloned().collect();
        let mut ours = plan.eigenvalues().to_vec();
        dense.sort_by(f64::total_cmp);
        ours.sort_by(f64::total_cmp);
        let scale = dense.iter().cloned().fold(0.0, f64::max);
        for (a, b) in ours.iter().zip(&dense) {
            assert!((a - b).abs() <= 1e-10 * scale, "{a} vs {b}");
        }
    }

    #[test]
    fn rejects_extreme_hurst() {
        assert!(matches!(build_circulant_plan(5e-4, 8), Err(Error::Domain(_))));
        assert!(matches!(build_circulant_plan(1.0, 8), Err(Error::Domain(_))));
        assert!(matches!(build_circulant_plan(0.5, 0), Err(Error::Domain(_))));
        assert!(build_circulant_plan(1e-3, 64).is_ok());
    }

    #[test]
    fn embedding_psd_across_hurst() {
        for h in [0.001, 0.05, 0.2, 0.45, 0.55, 0.8, 0.95, 0.999] {
            for n in [1, 2, 3, 17, 100, 1000] {
                build_circulant_plan(h, n).unwrap();
            }
        }
    }

    #[test]
    fn fft_route_at_half_is_white() {
        // Exercise the transform on a white plan by bypassing the shortcut.
        let mut plan = build_circulant_plan(0.5, 64).unwrap();
        plan.white = false;
        let mut s = CirculantSampler::new(Arc::new(plan));
        let mut rng = stream(3, Domain::Paths, 0);
        let (mut a, mut b) = (vec![0.0; 64], vec![0.0; 64]);
        let n = 4000;
        let (mut var, mut lag1, mut cross) = (0.0, 0.0, 0.0);
        for _ in 0..n {
            s.increments_pair(&mut rng, &mut a, &mut b);
            var += a[10] * a[10] + b[10] * b[10];
            lag1 += a[10] * a[11] + b[10] * b[11];
            cross += a[10] * b[10];
        }
        let m = 2.0 * n as f64;
        assert!((var / m - 1.0).abs() < 5.0 * (2.0 / m).sqrt());
        assert!((lag1 / m).abs() < 5.0 / m.sqrt());
        assert!((cross / n as f64).abs() < 5.0 / (n as f64).sqrt());
    }
}
