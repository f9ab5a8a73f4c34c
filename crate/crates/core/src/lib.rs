//! Persistence probabilities of fractional Brownian motion with a fixed or
//! random Hurst exponent.
//!
//! The crate samples exact fractional Gaussian paths on uniform grids,
//! estimates persistence and small-barrier probabilities by Monte Carlo,
//! fits power-law exponents and checks a set of analytic bounds against
//! simulation.

pub mod checks;
pub mod cli;
pub mod error;
pub mod estimate;
pub mod exec;
pub mod fit;
pub mod hurst_law;
pub mod normal;
pub mod paths;
pub mod persistence;
pub mod rng;

pub use error::{Error, Result};
pub use estimate::McEstimate;
pub use fit::{fit_exponent, ExponentFit, FitPoint};
pub use hurst_law::{EssSup, HurstLaw};
pub use persistence::{
    estimate_expectation, estimate_expectations, estimate_persistence_annealed, estimate_persistence_curve,
    estimate_persistence_fixed, estimate_small_barrier, estimate_small_barrier_curve, grid_points_per_unit, Functional,
    GridRule, McConfig,
};
