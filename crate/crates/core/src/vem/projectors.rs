//! Energy and L2 projections onto `P_k(E)` computed from the degrees of freedom.
//!
//! The energy projection solves `G s = B v` where `B` comes from integrating
//! `\int_E grad m_a . grad v` by parts: boundary terms use the (k+1)-point
//! Gauss–Lobatto rule on each side, whose nodes are exactly the vertex and
//! edge DOFs, and the interior term reads the moment DOFs. The first row is
//! replaced by the constant-fixing functional (boundary mean for `k = 1`,
//! cell mean otherwise).
//!
//! The L2 projection matches the moment DOFs against `P_{k-2}` and, on the
//! L2-orthogonal complement of `P_{k-2}` in `P_k`, the moments of the energy
//! projection (the enhancement constraint).

use nalgebra::DMatrix;

use super::element::VemElement;
use crate::error::{Error, Result};
use crate::geometry::{dim_p, quadrature::gauss_lobatto};

#[derive(Debug, Clone)]
pub struct ProjectorPack {
    /// Monomial coefficients of the energy projection, `n_k x N_dof`.
    pub pi_nabla_star: DMatrix<f64>,
    /// Monomial coefficients of the L2 projection, `n_k x N_dof`.
    pub pi_zero_star: DMatrix<f64>,
    /// `B D`: stiffness Gram matrix of the monomials with the first row
    /// replaced by the constant-fixing functional.
    pub g: DMatrix<f64>,
    /// L2 Gram matrix of the monomials.
    pub h: DMatrix<f64>,
    pub b: DMatrix<f64>,
    /// Right-hand side of the L2 projection, `H pi_zero_star = C`.
    pub c: DMatrix<f64>,
    /// DOF vectors of the monomials as columns, `N_dof x n_k`.
    pub d: DMatrix<f64>,
}

impl ProjectorPack {
    /// `G` with the constant row zeroed: the stiffness form on monomials.
    pub fn g_tilde(&self) -> DMatrix<f64> {
        let mut g = self.g.clone();
        g.row_mut(0).fill(0.0);
        g
    }

    /// Energy projection as a map on DOF coordinates, `D pi_nabla_star`.
    pub fn pi_nabla(&self) -> DMatrix<f64> {
        &self.d * &self.pi_nabla_star
    }

    pub fn pi_zero(&self) -> DMatrix<f64> {
        &self.d * &self.pi_zero_star
    }
}

fn solve_checked(a: &DMatrix<f64>, rhs: &DMatrix<f64>, cell: usize, which: &'static str) -> Result<DMatrix<f64>> {
    let inv = a
        .clone()
        .try_inverse()
        .ok_or(Error::SingularProjector { cell, which })?;
    let cond = a.norm() * inv.norm();
    if !cond.is_finite() || cond > 1e14 {
        return Err(Error::SingularProjector { cell, which });
    }
    a.clone().lu().solve(rhs).ok_or(Error::SingularProjector { cell, which })
}

pub fn build_projectors(el: &VemElement) -> Result<ProjectorPack> {
    let k = el.degree;
    let nk = el.n_monomials();
    let ndof = el.n_dofs();
    let n = el.polygon.len();
    let dofs = &el.dofs;

    let mut b = DMatrix::zeros(nk, ndof);
    let (gl_nodes, gl_weights) = gauss_lobatto(k + 1);
    for i in 0..n {
        let p = el.polygon[i];
        let q = el.polygon[(i + 1) % n];
        let e = q - p;
        let len = e.norm();
        let normal = nalgebra::Vector2::new(e.y, -e.x) / len;
        for (j, (&s, &w)) in gl_nodes.iter().zip(&gl_weights).enumerate() {
            let x = p + e * (0.5 * (1.0 + s));
            let dof = if j == 0 {
                i
            } else if j == k {
                (i + 1) % n
            } else {
                dofs.edge_node(i, j - 1)
            };
            let (_, grads) = el.basis.eval(&x);
            for a in 1..nk {
                b[(a, dof)] += 0.5 * len * w * grads[a].dot(&normal);
            }
        }
    }
    for a in 1..nk {
        for (g, coef) in el.basis.laplacian(a) {
            // \int_E m_g v = |E| * moment DOF g
            b[(a, dofs.moment(g))] -= coef * el.area;
        }
    }
    if k == 1 {
        for i in 0..n {
            let prev = (el.polygon[i] - el.polygon[(i + n - 1) % n]).norm();
            let next = (el.polygon[(i + 1) % n] - el.polygon[i]).norm();
            b[(0, i)] = 0.5 * (prev + next) / el.perimeter;
        }
    } else {
        b[(0, dofs.moment(0))] = 1.0;
    }

    let d = el.monomial_dof_matrix();
    let g = &b * &d;
    let pi_nabla_star = solve_checked(&g, &b, el.cell, "energy projector")?;

    let w = DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(&el.quadrature.weights));
    let h_raw = el.basis_at_nodes.transpose() * &w * &el.basis_at_nodes;
    let h = 0.5 * (&h_raw + h_raw.transpose());

    // Rows of C: \int_E (Pi0 v) m_a for every monomial a.
    let nlow = dim_p(k as isize - 2);
    let h_pin = &h * &pi_nabla_star;
    let mut c = DMatrix::zeros(nk, ndof);
    for a in 0..nlow {
        c[(a, dofs.moment(a))] = el.area;
    }
    if nlow == 0 {
        c.copy_from(&h_pin);
    } else {
        // For high a write m_a = q_a + sum_b r_ab m_b with q_a orthogonal to
        // P_{k-2}; then \int v m_a = \int (Pi_nabla v) q_a + sum_b r_ab \int v m_b.
        let h_ll = h.view((0, 0), (nlow, nlow)).into_owned();
        let h_lh = h.view((0, nlow), (nlow, nk - nlow)).into_owned();
        let r = h_ll
            .cholesky()
            .ok_or(Error::SingularProjector { cell: el.cell, which: "low-order gram" })?
            .solve(&h_lh);
        let low_pin = h_pin.rows(0, nlow).into_owned();
        let low_c = c.rows(0, nlow).into_owned();
        for a in nlow..nk {
            let ra = r.column(a - nlow);
            let row = h_pin.row(a) - ra.transpose() * &low_pin + ra.transpose() * &low_c;
            c.row_mut(a).copy_from(&row);
        }
    }
    let pi_zero_star = h
        .clone()
        .cholesky()
        .ok_or(Error::SingularProjector { cell: el.cell, which: "mass gram" })?
        .solve(&c);

    Ok(ProjectorPack {
        pi_nabla_star,
        pi_zero_star,
        g,
        h,
        b,
        c,
        d,
    })
}
