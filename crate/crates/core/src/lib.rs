//! Virtual element discretization of the scalar wave equation
//! `u_tt - Δu = f` on polygonal meshes of the unit square, with Newmark and
//! Bathe time stepping and a modal reference solution.

// Negated comparisons are deliberate: they treat NaN as a failure.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod assembly;
pub mod error;
pub mod geometry;
pub mod harness;
pub mod linalg;
pub mod mesh;
pub mod spectral;
pub mod time_integration;
pub mod vem;

pub use assembly::{assemble, discrete_norms, interpolate, DiscreteSystem, DofLayout};
pub use error::{Error, Result};
pub use geometry::Point;
pub use mesh::{generate_grid_mesh, generate_voronoi_mesh, validate_mesh, MeshQualityReport, PolygonalMesh};
pub use vem::MassMode;
