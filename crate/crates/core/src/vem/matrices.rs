use nalgebra::{DMatrix, DVector};

use super::element::VemElement;
use super::projectors::ProjectorPack;

/// How the local mass form treats the complement of the L2 projection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MassMode {
    /// `(Pi0 u, Pi0 v) + |E| (I - Pi0) u . (I - Pi0) v`
    #[default]
    Stabilized,
    /// `(Pi0 u, Pi0 v)` only; the global matrix may be singular.
    NonStabilized,
}

impl MassMode {
    pub fn as_str(self) -> &'static str {
        match self {
            MassMode::Stabilized => "stab",
            MassMode::NonStabilized => "nostab",
        }
    }
}

impl std::str::FromStr for MassMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "stab" | "stabilized" => Ok(Self::Stabilized),
            "nostab" | "non_stabilized" | "non-stabilized" => Ok(Self::NonStabilized),
            other => Err(format!("unknown mass mode {other:?} (expected stab or nostab)")),
        }
    }
}

fn symmetrize(a: DMatrix<f64>) -> DMatrix<f64> {
    let at = a.transpose();
    // a_ij + a_ji is commutative in floating point, so the result is exactly symmetric
    (a + at) * 0.5
}

fn complement_gram(pi: &DMatrix<f64>) -> DMatrix<f64> {
    let n = pi.nrows();
    let r = DMatrix::identity(n, n) - pi;
    r.transpose() * r
}

/// Consistency term plus `stab_scale` times the identity form on `(I - Pi_nabla)`.
pub fn local_stiffness(pack: &ProjectorPack, stab_scale: f64) -> DMatrix<f64> {
    let gt = pack.g_tilde();
    let gt = 0.5 * (&gt + gt.transpose());
    let consistency = pack.pi_nabla_star.transpose() * gt * &pack.pi_nabla_star;
    let stab = complement_gram(&pack.pi_nabla());
    symmetrize(consistency + stab * stab_scale)
}

pub fn local_mass(pack: &ProjectorPack, el: &VemElement, mode: MassMode) -> DMatrix<f64> {
    let consistency = pack.pi_zero_star.transpose() * &pack.h * &pack.pi_zero_star;
    match mode {
        MassMode::Stabilized => symmetrize(consistency + complement_gram(&pack.pi_zero()) * el.area),
        MassMode::NonStabilized => symmetrize(consistency),
    }
}

/// `b_i = \int_E f Pi0 phi_i`, with `f` sampled at the element quadrature nodes.
pub fn local_load(pack: &ProjectorPack, el: &VemElement, f_samples: &[f64]) -> DVector<f64> {
    pack.pi_zero_star.tr_mul(&el.moments_of_samples(f_samples))
}

#[derive(Debug, Clone)]
pub struct LocalMatrices {
    pub stiffness: DMatrix<f64>,
    pub mass: DMatrix<f64>,
}
