//! Standard normal density, distribution function and quantile.

use libm::erfc;

const SQRT_2: f64 = std::f64::consts::SQRT_2;

pub fn pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// Φ(x), evaluated through erfc so that the lower tail keeps full
/// relative precision.
pub fn cdf(x: f64) -> f64 {
    0.5 * erfc(-x / SQRT_2)
}

/// Φ(−x) = P(N > x).
pub fn upper_tail(x: f64) -> f64 {
    0.5 * erfc(x / SQRT_2)
}

pub fn quantile(p: f64) -> f64 {
    use statrs::distribution::{ContinuousCDF, Normal};
    Normal::standard().inverse_cdf(p)
}

/// Two-sided critical value for a confidence level, e.g. 1.95996 for 0.95.
pub fn two_sided_z(level: f64) -> f64 {
    quantile(0.5 + 0.5 * level)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn reference_values() {
        assert_relative_eq!(cdf(0.0), 0.5, epsilon = 1e-15);
        assert_relative_eq!(cdf(1.0), 0.841_344_746_068_542_9, epsilon = 1e-14);
        assert_relative_eq!(upper_tail(5.0), 2.866_515_718_791_939e-7, max_relative = 1e-12);
        assert_relative_eq!(two_sided_z(0.95), 1.959_963_984_540_054, epsilon = 1e-9);
        assert_relative_eq!(pdf(1.0), 0.241_970_724_519_143_37, epsilon = 1e-15);
    }
}
