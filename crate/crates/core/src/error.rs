use thiserror::Error;

/// Errors raised by the numerical routines of this crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("argument {x} outside interpolation range [{lo}, {hi}]")]
    OutOfRange { x: f64, lo: f64, hi: f64 },

    #[error("metric is singular at z = {0}")]
    SingularPoint(String),

    #[error("{0} did not converge; last residual {1:.3e}")]
    NonConvergence(String, f64),

    #[error("singular operator: {0}")]
    SingularOperator(String),

    #[error("eigenvalue separation violated for blocks {pair:?}: |den| = {modulus:.3e} at z = {witness}")]
    Separation {
        pair: (usize, usize),
        modulus: f64,
        witness: String,
    },

    #[error("branch tracking failed: {0}")]
    BranchTracking(String),

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
