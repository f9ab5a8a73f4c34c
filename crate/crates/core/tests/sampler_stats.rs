use fbmre::paths::{
    build_circulant_plan, fbm_cov, fgn_autocov, sample_degenerate_h1, sample_fbm_path, sample_path, CirculantSampler,
    GridSpec,
};
use fbmre::rng::{stream, Domain};
use proptest::prelude::*;
use statrs::distribution::{ContinuousCDF, Normal};
use std::sync::Arc;

fn sample_values(hurst: f64, grid: &GridSpec, n_paths: u64, seed: u64) -> Vec<Vec<f64>> {
    (0..n_paths)
        .map(|i| {
            sample_fbm_path(hurst, grid, &mut stream(seed, Domain::Paths, i))
                .unwrap()
                .values
        })
        .collect()
}

#[test]
fn marginal_variance_at_t100() {
    let grid = GridSpec::new(100.0, 1).unwrap();
    for h in [0.3, 0.7] {
        let n = 20_000;
        let paths = sample_values(h, &grid, n, 11);
        let last: Vec<f64> = paths.iter().map(|p| p[100]).collect();
        let var = last.iter().map(|x| x * x).sum::<f64>() / n as f64;
        let exact = 100f64.powf(2.0 * h);
        let se = exact * (2.0 / n as f64).sqrt();
        assert!((var - exact).abs() < 5.0 * se, "H={h}: {var} vs {exact}");
    }
}

#[test]
fn covariance_b1_b3_at_h08() {
    let exact = 0.5 * (1.0 + 3f64.powf(1.6) - 2f64.powf(1.6));
    assert!((exact - 1.88406).abs() < 1e-5);
    assert!((fbm_cov(0.8, 1.0, 3.0) - exact).abs() < 1e-12);
    let grid = GridSpec::new(3.0, 1).unwrap();
    let n = 100_000;
    let prods: Vec<f64> = sample_values(0.8, &grid, n, 12).iter().map(|p| p[1] * p[3]).collect();
    let mean = prods.iter().sum::<f64>() / n as f64;
    let sd = (prods.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt();
    assert!((mean - exact).abs() < 5.0 * sd / (n as f64).sqrt(), "{mean} vs {exact}");
}

#[test]
fn increments_are_standard_normal() {
    // Kolmogorov-Smirnov on one increment across independent paths.
    let plan = Arc::new(build_circulant_plan(0.7, 64).unwrap());
    let mut s = CirculantSampler::new(plan);
    let mut inc = vec![0.0; 64];
    let mut xs: Vec<f64> = (0..5000)
        .map(|i| {
            s.increments(&mut stream(13, Domain::Paths, i), &mut inc);
            inc[37]
        })
        .collect();
    xs.sort_by(|a, b| a.total_cmp(b));
    let n = xs.len() as f64;
    let norm = Normal::standard();
    let d = xs
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = norm.cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max);
    // Critical value at level 1e-4 is about 1.95/sqrt(n).
    assert!(d < 1.95 / n.sqrt(), "KS statistic {d}");
}

#[test]
fn increment_autocovariance_matches_fgn() {
    let plan = Arc::new(build_circulant_plan(0.3, 32).unwrap());
    let mut s = CirculantSampler::new(plan);
    let (mut a, mut b) = (vec![0.0; 32], vec![0.0; 32]);
    let n = 50_000u64;
    let mut acc = [0.0f64; 4];
    let mut acc2 = [0.0f64; 4];
    for i in 0..n {
        s.increments_pair(&mut stream(14, Domain::Paths, i), &mut a, &mut b);
        for (lag, (s1, s2)) in acc.iter_mut().zip(acc2.iter_mut()).enumerate() {
            let p = a[5] * a[5 + lag];
            *s1 += p;
            *s2 += p * p;
        }
    }
    for lag in 0..4 {
        let m = acc[lag] / n as f64;
        let se = ((acc2[lag] / n as f64 - m * m) / n as f64).sqrt();
        let exact = fgn_autocov(0.3, lag as u64).unwrap();
        assert!((m - exact).abs() < 5.0 * se, "lag {lag}: {m} vs {exact}");
    }
}

#[test]
fn circulant_pair_components_are_uncorrelated() {
    let plan = Arc::new(build_circulant_plan(0.8, 16).unwrap());
    let mut s = CirculantSampler::new(plan);
    let (mut a, mut b) = (vec![0.0; 16], vec![0.0; 16]);
    let n = 50_000u64;
    let (mut sum, mut sum2) = (0.0, 0.0);
    for i in 0..n {
        s.increments_pair(&mut stream(15, Domain::Paths, i), &mut a, &mut b);
        let p = a[3] * b[3];
        sum += p;
        sum2 += p * p;
    }
    let m = sum / n as f64;
    let se = ((sum2 / n as f64 - m * m) / n as f64).sqrt();
    assert!(m.abs() < 5.0 * se, "{m}");
}

#[test]
fn degenerate_process_is_linear() {
    let grid = GridSpec::new(2.0, 4).unwrap();
    let p = sample_degenerate_h1(&grid, &mut stream(1, Domain::Paths, 0));
    let xi = p.values[4];
    for (k, v) in p.values.iter().enumerate() {
        assert!((v - xi * k as f64 / 4.0).abs() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn paths_start_at_zero_with_grid_length(h in 0.05f64..=1.0, t in 0.1f64..20.0, m in 1u32..40, seed in any::<u64>()) {
        let grid = GridSpec::new(t, m).unwrap();
        let p = sample_path(h, &grid, &mut stream(seed, Domain::Paths, 0)).unwrap();
        prop_assert_eq!(p.values.len(), grid.n_points() + 1);
        prop_assert_eq!(p.values[0], 0.0);
        prop_assert!(p.values.iter().all(|v| v.is_finite()));
        prop_assert!(grid.last_time() >= t - 1e-9 && grid.last_time() < t + 1.0 / f64::from(m) + 1e-9);
    }

    #[test]
    fn same_stream_same_path(h in 0.05f64..0.99, n in 1u32..200, seed in any::<u64>(), idx in 0u64..1000) {
        let grid = GridSpec::new(1.0, n).unwrap();
        let a = sample_path(h, &grid, &mut stream(seed, Domain::Paths, idx)).unwrap();
        let b = sample_path(h, &grid, &mut stream(seed, Domain::Paths, idx)).unwrap();
        prop_assert_eq!(a.values, b.values);
    }

    #[test]
    fn embedding_eigenvalues_nonnegative(h in 0.01f64..0.999, n in 1usize..3000) {
        let plan = build_circulant_plan(h, n).unwrap();
        prop_assert!(plan.eigenvalues().iter().all(|&x| x >= 0.0));
    }
}
