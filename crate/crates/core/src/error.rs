use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("mesh generation failed after {attempts} attempts: {reason}")]
    MeshGeneration { attempts: usize, reason: String },

    #[error("invalid mesh: {reason} (cells: {cells:?})")]
    InvalidMesh { reason: String, cells: Vec<usize> },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("polygon kernel is empty; cannot anchor a fan triangulation")]
    EmptyKernel,

    #[error("cell {cell}: {reason}")]
    Geometry { cell: usize, reason: String },

    #[error("cell {cell}: singular projector system ({which})")]
    SingularProjector { cell: usize, which: &'static str },

    #[error("assembly: {0}")]
    Assembly(String),

    #[error("matrix is not positive definite (pivot {pivot} at row {row})")]
    NotPositiveDefinite { row: usize, pivot: f64 },

    #[error("negative quadratic form value {value:e}")]
    NegativeQuadraticForm { value: f64 },

    #[error(
        "CFL condition violated: lambda_max * tau^2 = {lhs:.6e} > {rhs:.6e} \
         (lambda_max = {lambda_max:.6e}, tau = {tau}, beta = {beta}, gamma = {gamma}, eps = {eps})"
    )]
    Cfl {
        lambda_max: f64,
        tau: f64,
        beta: f64,
        gamma: f64,
        eps: f64,
        lhs: f64,
        rhs: f64,
    },

    #[error("the mass matrix is not positive definite; use estimate_max_eigenvalue for this pencil")]
    MassNotPositiveDefinite,

    #[error("the mass matrix is numerically singular; the largest eigenvalue is unbounded")]
    UnboundedSpectrum,

    #[error("iteration did not converge after {iterations} iterations (last estimate {last:e})")]
    NoConvergence { iterations: usize, last: f64 },

    #[error("system too large for a dense decomposition: {ndof} > {cap}")]
    TooLarge { ndof: usize, cap: usize },

    #[error("study cell h = {h}, tau = {tau}: {source}")]
    Study { h: f64, tau: f64, source: Box<Error> },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
