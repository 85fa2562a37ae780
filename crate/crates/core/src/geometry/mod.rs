//! Element geometry: polygon primitives, scaled monomials and quadrature.

pub mod monomial;
pub mod polygon;
pub mod quadrature;

pub use monomial::{dim_p, ScaledMonomialBasis};
pub use polygon::Point;
pub use quadrature::{edge_gauss_lobatto, polygon_quadrature, QuadratureRule};
