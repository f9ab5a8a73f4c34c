//! Numerical checks of analytic bounds, inequalities and constants.
//!
//! Statistical checks compare a Monte-Carlo estimate with a formula and
//! pass when the shortfall is within [`K_SIGMA`] standard errors.
//! Deterministic checks use a fixed absolute tolerance.

mod analytic;
mod barrier;
mod discretization;
mod moments;
mod ordering;
mod records;
mod suite;

use serde::{Deserialize, Serialize};

pub use analytic::{
    bz_comparison_cov, extreme_value_constants, extreme_value_mc, mills_ratio_check, rkhs_shift_quantities,
    ExtremeValueReport, MillsRow, RkhsQuantities,
};
pub use barrier::{check_negative_barrier_bound, negative_barrier_event};
pub use discretization::{
    check_discretization_error, check_discretization_errors, discretization_bound, DiscretizationCheck,
    SURROGATE_REFINE,
};
pub use moments::{
    check_expected_max_bounds, check_mgf_bound, check_statement1, expected_max_lower, expected_max_upper, mgf_upper,
    statement1_terms, Statement1Report, Statement1Row,
};
pub use ordering::{
    check_slepian_monotonicity, probe_monotonicity_conjecture, MonotonicityProbe, OrderingRow, SlepianReport,
};
pub use records::{
    count_records, count_records_brute_force, count_right_to_left_records, RecordStats, RECORD_MAX_POINTS,
};
pub use suite::{run_verify, select_checks, CheckEntry, CheckTable, VerifyConfig, VerifyReport, CHECK_NAMES};

/// One-sided slack, in standard errors, for statistical checks.
pub const K_SIGMA: f64 = 4.0;

/// Absolute tolerance of deterministic checks.
pub const EXACT_TOL: f64 = 1e-9;

/// Outcome of `lhs ≤ rhs`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub lhs_se: f64,
    pub rhs_se: f64,
    /// Allowed shortfall: the check passes iff `margin ≥ −slack`.
    pub slack: f64,
    pub margin: f64,
    pub pass: bool,
}

impl BoundCheck {
    /// Statistical check with slack `K_SIGMA·√(lhs_se² + rhs_se²)`.
    pub fn statistical(name: impl Into<String>, lhs: f64, lhs_se: f64, rhs: f64, rhs_se: f64) -> Self {
        let slack = K_SIGMA * lhs_se.hypot(rhs_se);
        Self::with_slack(name, lhs, lhs_se, rhs, rhs_se, slack)
    }

    /// Deterministic check with an absolute tolerance.
    pub fn exact(name: impl Into<String>, lhs: f64, rhs: f64, tol: f64) -> Self {
        Self::with_slack(name, lhs, 0.0, rhs, 0.0, tol)
    }

    pub fn with_slack(name: impl Into<String>, lhs: f64, lhs_se: f64, rhs: f64, rhs_se: f64, slack: f64) -> Self {
        let margin = rhs - lhs;
        Self {
            name: name.into(),
            lhs,
            rhs,
            lhs_se,
            rhs_se,
            slack,
            margin,
            pass: margin >= -slack,
        }
    }

    /// Margin in units of the combined standard error.
    pub fn margin_in_se(&self) -> f64 {
        self.margin / self.lhs_se.hypot(self.rhs_se)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pass_rule() {
        let c = BoundCheck::statistical("x", 1.0, 0.1, 0.7, 0.0);
        assert!(c.pass);
        assert!((c.margin + 0.3).abs() < 1e-15);
        let c = BoundCheck::statistical("x", 1.0, 0.1, 0.5, 0.0);
        assert!(!c.pass);
        let c = BoundCheck::exact("x", 1.0, 1.0 - 1e-10, EXACT_TOL);
        assert!(c.pass);
        let c = BoundCheck::exact("x", 1.0, 1.0 - 1e-8, EXACT_TOL);
        assert!(!c.pass);
    }

    #[test]
    fn margin_in_se_uses_combined_error() {
        let c = BoundCheck::statistical("x", 0.0, 3.0, 10.0, 4.0);
        assert!((c.margin_in_se() - 2.0).abs() < 1e-12);
    }
}
