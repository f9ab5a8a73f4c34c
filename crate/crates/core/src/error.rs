use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("circulant embedding is not positive semidefinite: min eigenvalue {min:e}, max eigenvalue {max:e}")]
    EmbeddingNotPsd { min: f64, max: f64 },

    #[error("size {size} exceeds cap {cap}")]
    SizeExceeded { size: usize, cap: usize },

    #[error("covariance factorization failed for H={hurst} on {n_points} points")]
    FactorizationFailed { hurst: f64, n_points: usize },

    #[error("degenerate regression design: {0}")]
    DegenerateDesign(String),

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// True for errors caused by bad user input rather than numerics.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::Domain(_)
                | Error::InvalidConfig(_)
                | Error::PreconditionViolated(_)
                | Error::SizeExceeded { .. }
                | Error::Json(_)
        )
    }
}
