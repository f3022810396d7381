use std::path::PathBuf;

use crate::spectral::SpectralReport;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("degenerate simplex: measure {measure:e} below tolerance {tolerance:e}")]
    DegenerateSimplex { measure: f64, tolerance: f64 },

    #[error("facet {facet:?} is shared by {count} elements")]
    NonManifoldMesh { facet: Vec<usize>, count: usize },

    #[error("mesh is not conforming: {0}")]
    NonConforming(String),

    #[error("unsupported dimension {0} (expected 2, 3 or 4)")]
    UnsupportedDimension(usize),

    #[error("the discrete space has no degrees of freedom")]
    EmptySpace,

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionError { expected: usize, actual: usize },

    #[error("linear solver failed after {iterations} iterations (relative residual {residual:e})")]
    SolverFailure { iterations: usize, residual: f64 },

    #[error("sparse factorization failed: {0}")]
    Factorization(String),

    #[error("eigenvalue iteration did not converge (kappa estimate {:.6e})", .0.kappa)]
    EigsNotConverged(Box<SpectralReport>),

    #[error("non-positive Rayleigh quotient {0:e}")]
    NotPositiveDefinite(f64),

    #[error("non-finite value in {0}")]
    NonFinite(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("parse error in {path:?} line {line}: {message}")]
    Parse {
        path: Option<PathBuf>,
        line: usize,
        message: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
