use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("degenerate chart at ({0}, {1}): metric determinant {2} is not positive")]
    DegenerateChart(f64, f64, f64),

    #[error("invalid mesh parameters: {0}")]
    InvalidMesh(String),

    #[error("degenerate facet {0}: zero area")]
    DegenerateFacet(usize),

    #[error("point ({0}, {1}) lies outside the meshed domain")]
    OutsideDomain(f64, f64),

    #[error("index ({row}, {col}) out of range for a {nrows}x{ncols} matrix")]
    IndexOutOfRange {
        row: usize,
        col: usize,
        nrows: usize,
        ncols: usize,
    },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not symmetric positive definite")]
    NotPositiveDefinite,

    #[error("conjugate gradient did not converge: {iterations} iterations, relative residual {residual:e}")]
    NotConverged { iterations: usize, residual: f64 },

    #[error("time step {step}: {source}")]
    Step {
        step: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("unsupported tensor rank {rank} for {method}")]
    UnsupportedRank { rank: usize, method: &'static str },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
