//! Exact Gaussian path simulation on uniform grids.

mod circulant;
mod functionals;
mod grid;
mod sampler;

pub use circulant::{
    build_circulant_plan, fgn_autocov, CirculantPlan, CirculantSampler, EIGEN_CLIP_TOL, MAX_PLAN_HURST, MIN_PLAN_HURST,
};
pub use functionals::{log_trapezoid_exp, max_and_abs_max, path_functionals, PathFunctionals};
pub use grid::GridSpec;
pub use sampler::{
    fbm_cov, sample_degenerate_h1, sample_fbm_cholesky, sample_fbm_path, sample_path, CholeskySampler, Path,
    CHOLESKY_MAX_POINTS,
};

pub(crate) use circulant::integrate_increments;
pub(crate) use grid::steps_within;
