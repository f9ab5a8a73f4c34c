use serde::{Deserialize, Serialize};

use super::sampler::Path;

/// Running maximum, absolute maximum and `∫ e^{B}` over a path prefix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathFunctionals {
    pub max: f64,
    pub abs_max: f64,
    pub exp_integral: f64,
}

pub fn path_functionals(path: &Path, sub_horizon: f64) -> PathFunctionals {
    let last = path.grid.last_index_within(sub_horizon);
    let values = &path.values[..=last];
    let (max, abs_max) = max_and_abs_max(values);
    let exp_integral = log_trapezoid_exp(values, 1.0, path.grid.step()).exp();
    PathFunctionals {
        max,
        abs_max,
        exp_integral,
    }
}

pub fn max_and_abs_max(values: &[f64]) -> (f64, f64) {
    values.iter().fold((f64::NEG_INFINITY, 0.0f64), |(mx, amx), &v| {
        (mx.max(v), amx.max(v.abs()))
    })
}

/// `ln` of the trapezoid rule for `∫ e^{scale·v(t)} dt` on a grid with
/// spacing `step`, shifted by the maximum so large exponents cannot overflow.
pub fn log_trapezoid_exp(values: &[f64], scale: f64, step: f64) -> f64 {
    if values.len() < 2 {
        return f64::NEG_INFINITY;
    }
    let shift = values.iter().fold(f64::NEG_INFINITY, |a, &v| a.max(scale * v));
    let last = values.len() - 1;
    let mut acc = 0.0;
    for (k, &v) in values.iter().enumerate() {
        let w = if k == 0 || k == last { 0.5 } else { 1.0 };
        acc += w * (scale * v - shift).exp();
    }
    shift + (acc * step).ln()
}
