//! Local virtual element machinery: degrees of freedom, projections and the
//! element stiffness, mass and load contributions.

mod dofs;
mod element;
mod matrices;
mod projectors;

pub use dofs::{build_dofs, DofKind, LocalDofSet};
pub use element::VemElement;
pub use matrices::{local_load, local_mass, local_stiffness, LocalMatrices, MassMode};
pub use projectors::{build_projectors, ProjectorPack};

#[cfg(test)]
mod tests;
