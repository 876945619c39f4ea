use std::path::PathBuf;

use thiserror::Error;

/// Everything that can go wrong while building, validating or solving a problem.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("bad dimensions: {0}")]
    BadDims(String),

    #[error("malformed problem data: {0}")]
    Format(String),

    #[error("constraint matrix does not have full row rank (numerical rank {rank} < {m})")]
    RankDeficient { rank: usize, m: usize },

    #[error("Q is not positive semidefinite within tolerance {tolerance:e}")]
    NotPsd { tolerance: f64 },

    #[error("point is not interior: {0}")]
    NonInterior(String),

    #[error("point is not primal-dual feasible (primal residual {primal:e}, dual residual {dual:e})")]
    NotFeasible { primal: f64, dual: f64 },

    #[error("start is outside the neighborhood: distance {distance:e} > theta*mu = {bound:e}")]
    NotInNeighborhood { distance: f64, bound: f64 },

    #[error("centering stalled after {iterations} steps (relative distance {relative_distance:e})")]
    CenteringStalled {
        iterations: usize,
        relative_distance: f64,
    },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("OSS matrix is numerically singular")]
    SingularM,

    #[error("iterative solver hit its budget of {iterations} iterations (residual {residual:e} > {tolerance:e})")]
    MaxInnerIters {
        iterations: usize,
        residual: f64,
        tolerance: f64,
    },

    #[error("centering residual is exactly zero")]
    ZeroResidual,

    #[error("trace is empty")]
    EmptyTrace,

    #[error("trace row {0} has no condition number; re-run the solve with kappa tracing enabled")]
    MissingKappa(usize),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("label error at line {line}: {label} is not -1 or +1")]
    Label { line: usize, label: String },

    #[error("penalty C must be positive and finite, got {0}")]
    BadC(f64),

    #[error("a strictly positive eps_reg is required to build an interior start")]
    RegularizationRequired,

    #[error("solution layout mismatch: {0}")]
    LayoutMismatch(String),

    #[error("iteration {iteration}: {source}")]
    AtIteration {
        iteration: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn at_iteration(iteration: usize, source: Error) -> Self {
        Error::AtIteration {
            iteration,
            source: Box::new(source),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
