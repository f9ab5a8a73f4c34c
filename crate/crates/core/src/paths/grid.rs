use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform time grid `{k/m : k = 0..=n_points}` covering `[0, horizon]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    horizon: f64,
    points_per_unit: u32,
    n_points: usize,
}

/// Number of grid steps of size `1/m` needed to reach `horizon`.
///
/// The relative fuzz keeps horizons such as `100.0 * 32` that land on a grid
/// point from rounding up to an extra step.
pub(crate) fn steps_to_cover(horizon: f64, m: u32) -> usize {
    let x = horizon * f64::from(m);
    ((x - x.abs() * 1e-12).ceil() as usize).max(1)
}

/// Number of grid steps `k ≥ 1` with `k/m ≤ horizon`; may be zero.
pub(crate) fn steps_within(horizon: f64, m: u32) -> usize {
    let x = horizon * f64::from(m);
    (x + x.abs() * 1e-12).floor().max(0.0) as usize
}

impl GridSpec {
    pub fn new(horizon: f64, points_per_unit: u32) -> Result<Self> {
        if !(horizon.is_finite() && horizon > 0.0) {
            return Err(Error::Domain(format!("grid horizon must be positive, got {horizon}")));
        }
        if points_per_unit == 0 {
            return Err(Error::Domain("points_per_unit must be at least 1".into()));
        }
        Ok(Self {
            horizon,
            points_per_unit,
            n_points: steps_to_cover(horizon, points_per_unit),
        })
    }

    /// Grid with exactly `n` steps on `[0, 1]`.
    pub fn unit(n: u32) -> Result<Self> {
        Self::new(1.0, n)
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn points_per_unit(&self) -> u32 {
        self.points_per_unit
    }

    /// Number of steps; the grid holds `n_points + 1` times including 0.
    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn step(&self) -> f64 {
        1.0 / f64::from(self.points_per_unit)
    }

    pub fn time(&self, k: usize) -> f64 {
        k as f64 / f64::from(self.points_per_unit)
    }

    pub fn last_time(&self) -> f64 {
        self.time(self.n_points)
    }

    /// Index of the last grid point not exceeding `t` (clamped to the grid).
    pub fn last_index_within(&self, t: f64) -> usize {
        if t <= 0.0 {
            return 0;
        }
        let x = t * f64::from(self.points_per_unit);
        let k = (x + x * 1e-12).floor() as usize;
        k.min(self.n_points)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn covers_horizon() {
        let g = GridSpec::new(100.0, 32).unwrap();
        assert_eq!(g.n_points(), 3200);
        assert_eq!(g.last_time(), 100.0);

        let g = GridSpec::new(2.5, 2).unwrap();
        assert_eq!(g.n_points(), 5);

        let g = GridSpec::new(0.3, 1).unwrap();
        assert_eq!(g.n_points(), 1);
        assert!(g.last_time() >= 0.3 && g.last_time() < 0.3 + 1.0);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(GridSpec::new(0.0, 1).is_err());
        assert!(GridSpec::new(f64::NAN, 1).is_err());
        assert!(GridSpec::new(1.0, 0).is_err());
    }

    #[test]
    fn last_index_within_horizon() {
        let g = GridSpec::new(4.0, 4).unwrap();
        assert_eq!(g.last_index_within(1.0), 4);
        assert_eq!(g.last_index_within(1.1), 4);
        assert_eq!(g.last_index_within(100.0), 16);
        assert_eq!(g.last_index_within(0.0), 0);
    }

    #[test]
    fn steps_within_horizon() {
        assert_eq!(steps_within(100.0, 32), 3200);
        assert_eq!(steps_within(2.5, 2), 5);
        assert_eq!(steps_within(0.3, 1), 0);
        assert_eq!(steps_within(0.3, 10), 3);
        assert_eq!(steps_within(1.99, 1), 1);
    }

    proptest::proptest! {
        #[test]
        fn last_time_in_half_open_window(t in 0.01f64..500.0, m in 1u32..200) {
            let g = GridSpec::new(t, m).unwrap();
            proptest::prop_assert!(g.last_time() >= t * (1.0 - 1e-12));
            proptest::prop_assert!(g.last_time() < t + g.step());
        }
    }
}
