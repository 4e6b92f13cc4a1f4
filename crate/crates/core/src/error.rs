use thiserror::Error;

/// Errors raised by the laboratory routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("point {modulus} is not inside the open unit disk")]
    OutsideDisk { modulus: f64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("non-finite value in field `{field}`")]
    NonFinite { field: String },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("truncation {given} too small, need at least {needed} for tolerance {tolerance:e}")]
    Truncation {
        given: usize,
        needed: usize,
        tolerance: f64,
    },

    #[error("{what} did not converge: {detail}")]
    NoConvergence { what: String, detail: String },

    #[error("matrix is not positive definite (smallest eigenvalue {min_eigenvalue:e})")]
    NotPositiveDefinite { min_eigenvalue: f64 },

    #[error("matrix is ill-conditioned (condition estimate {condition:e})")]
    IllConditioned { condition: f64 },

    #[error("factorization residual {residual:e} exceeds tolerance {tolerance:e}")]
    Infeasible { residual: f64, tolerance: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
