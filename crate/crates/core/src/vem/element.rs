use nalgebra::{DMatrix, DVector};

use super::dofs::{build_dofs, DofKind, LocalDofSet};
use crate::error::{Error, Result};
use crate::geometry::{polygon, polygon_quadrature, Point, QuadratureRule, ScaledMonomialBasis};

/// Geometry, basis, quadrature and DOF layout of one cell.
#[derive(Debug, Clone)]
pub struct VemElement {
    pub cell: usize,
    pub degree: usize,
    pub polygon: Vec<Point>,
    pub area: f64,
    pub perimeter: f64,
    pub centroid: Point,
    pub diameter: f64,
    pub basis: ScaledMonomialBasis,
    /// Exact to degree `2k`.
    pub quadrature: QuadratureRule,
    /// Basis values at the quadrature nodes, one row per node.
    pub basis_at_nodes: DMatrix<f64>,
    pub dofs: LocalDofSet,
}

impl VemElement {
    pub fn new(cell: usize, polygon: Vec<Point>, k: usize) -> Result<Self> {
        if !(1..=3).contains(&k) {
            return Err(Error::InvalidArgument(format!("degree {k} not in 1..=3")));
        }
        let area = polygon::signed_area(&polygon);
        if !(area > 0.0) {
            return Err(Error::Geometry {
                cell,
                reason: format!("non-positive signed area {area}"),
            });
        }
        let centroid = polygon::centroid(&polygon);
        let diameter = polygon::diameter(&polygon);
        let perimeter = polygon::perimeter(&polygon);
        let basis = ScaledMonomialBasis::new(centroid, diameter, k);
        let quadrature = polygon_quadrature(&polygon, 2 * k).map_err(|e| Error::Geometry {
            cell,
            reason: e.to_string(),
        })?;
        let mut basis_at_nodes = DMatrix::zeros(quadrature.len(), basis.len());
        for (q, x) in quadrature.points.iter().enumerate() {
            for (a, v) in basis.values(x).into_iter().enumerate() {
                basis_at_nodes[(q, a)] = v;
            }
        }
        let dofs = build_dofs(cell, &polygon, k);
        Ok(Self {
            cell,
            degree: k,
            polygon,
            area,
            perimeter,
            centroid,
            diameter,
            basis,
            quadrature,
            basis_at_nodes,
            dofs,
        })
    }

    pub fn n_dofs(&self) -> usize {
        self.dofs.len()
    }

    pub fn n_monomials(&self) -> usize {
        self.basis.len()
    }

    /// `\int_E f m_alpha` for every monomial, `f` sampled at the quadrature nodes.
    pub fn moments_of_samples(&self, samples: &[f64]) -> DVector<f64> {
        assert_eq!(samples.len(), self.quadrature.len());
        let weighted = DVector::from_iterator(
            samples.len(),
            samples.iter().zip(&self.quadrature.weights).map(|(f, w)| f * w),
        );
        self.basis_at_nodes.tr_mul(&weighted)
    }

    /// DOF vector of a function evaluable everywhere on the cell.
    pub fn dofs_of(&self, f: impl Fn(&Point) -> f64) -> DVector<f64> {
        let samples: Vec<f64> = self.quadrature.points.iter().map(&f).collect();
        let moments = self.moments_of_samples(&samples);
        DVector::from_fn(self.n_dofs(), |i, _| match self.dofs.kinds[i] {
            DofKind::Moment(a) => moments[a] / self.area,
            _ => f(self.dofs.points[i].as_ref().unwrap()),
        })
    }

    /// DOF vector of the polynomial `sum_a coeffs[a] m_a`.
    pub fn dofs_of_polynomial(&self, coeffs: &DVector<f64>) -> DVector<f64> {
        let basis = &self.basis;
        self.dofs_of(|x| {
            basis
                .values(x)
                .iter()
                .zip(coeffs.iter())
                .map(|(m, c)| m * c)
                .sum()
        })
    }

    /// Matrix whose columns are the DOF vectors of the monomials.
    pub fn monomial_dof_matrix(&self) -> DMatrix<f64> {
        let nk = self.n_monomials();
        let mut d = DMatrix::zeros(self.n_dofs(), nk);
        for a in 0..nk {
            let mut e = DVector::zeros(nk);
            e[a] = 1.0;
            d.set_column(a, &self.dofs_of_polynomial(&e));
        }
        d
    }

    /// Evaluate the polynomial with monomial coefficients `coeffs` at `x`.
    pub fn eval_polynomial(&self, coeffs: &DVector<f64>, x: &Point) -> f64 {
        self.basis
            .values(x)
            .iter()
            .zip(coeffs.iter())
            .map(|(m, c)| m * c)
            .sum()
    }
}
