//! Sparse storage and direct solvers.

mod cholesky;
mod csc;

pub use cholesky::{reverse_cuthill_mckee, SparseCholesky};
pub use csc::{CscMatrix, TripletBuilder};
