use thiserror::Error;

/// Which end of an improper integral fails to converge.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DivergenceSide {
    Origin,
    Infinity,
}

impl std::fmt::Display for DivergenceSide {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DivergenceSide::Origin => write!(f, "origin"),
            DivergenceSide::Infinity => write!(f, "infinity"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("product of two scalars with nonzero pi parts leaves Q + Q*pi")]
    PiSquared,
    #[error("integral diverges at {side}: {detail}")]
    Divergent { side: DivergenceSide, detail: String },
    #[error("unsupported dimension N = {0}")]
    UnsupportedDimension(usize),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("quadrature did not converge: estimate {estimate:e} with error {error:e} after {subdivisions} subdivisions")]
    NoConvergence {
        estimate: f64,
        error: f64,
        subdivisions: usize,
    },
    #[error("quadratic part is not negative definite: {0}")]
    NotNegativeDefinite(String),
    #[error("unsupported symmetry class: {0}")]
    UnsupportedSymmetry(String),
    #[error("log fit rejected: {0}")]
    PoorFit(String),
    #[error("linear solve failed: {0}")]
    Solver(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
