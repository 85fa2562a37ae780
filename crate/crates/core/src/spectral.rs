//! Dense generalized eigendecomposition of `(K, M)` and the modal solution
//! of the semi-discrete problem, used as a reference for the time integrators.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::Path;

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::assembly::DiscreteSystem;
use crate::error::{Error, Result};
use crate::time_integration::Load;

/// Largest system decomposed densely by default.
pub const DEFAULT_DENSE_CAP: usize = 4000;

/// M-orthonormal eigenpairs, sorted by increasing eigenvalue.
#[derive(Debug, Clone)]
pub struct ModalBasis {
    pub eigenvalues: DVector<f64>,
    /// `mu = sqrt(lambda)`
    pub frequencies: DVector<f64>,
    /// Columns are the eigenvectors `w_n`, with `W^T M W = I`.
    pub vectors: DMatrix<f64>,
    /// `M W`, kept to project initial data.
    mass_vectors: DMatrix<f64>,
}

pub fn generalized_eigendecomposition(system: &DiscreteSystem) -> Result<ModalBasis> {
    generalized_eigendecomposition_with_cap(system, DEFAULT_DENSE_CAP)
}

pub fn generalized_eigendecomposition_with_cap(system: &DiscreteSystem, cap: usize) -> Result<ModalBasis> {
    let n = system.ndof();
    if n > cap {
        return Err(Error::TooLarge { ndof: n, cap });
    }
    let m = system.m.to_dense();
    let l = m.clone().cholesky().ok_or(Error::MassNotPositiveDefinite)?.l();
    // C = L^{-1} K L^{-T}
    let lk = l
        .solve_lower_triangular(&system.k.to_dense())
        .ok_or(Error::MassNotPositiveDefinite)?;
    let c = l
        .solve_lower_triangular(&lk.transpose())
        .ok_or(Error::MassNotPositiveDefinite)?;
    let c = 0.5 * (&c + c.transpose());
    let eig = SymmetricEigen::new(c);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let eigenvalues = DVector::from_iterator(n, order.iter().map(|&i| eig.eigenvalues[i]));
    if n > 0 && !(eigenvalues[0] > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "stiffness is not positive definite (smallest eigenvalue {:e})",
            eigenvalues[0]
        )));
    }
    let q = DMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    // W = L^{-T} Q
    let vectors = l
        .transpose()
        .solve_upper_triangular(&q)
        .ok_or(Error::MassNotPositiveDefinite)?;
    let frequencies = eigenvalues.map(f64::sqrt);
    let mass_vectors = m * &vectors;
    Ok(ModalBasis {
        eigenvalues,
        frequencies,
        vectors,
        mass_vectors,
    })
}

/// Quadrature controls of the Duhamel integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModalOptions {
    /// Upper bound on the Simpson step.
    pub tau_ref: f64,
    /// Minimum Simpson points per period of the fastest mode.
    pub points_per_period: usize,
}

impl Default for ModalOptions {
    fn default() -> Self {
        Self {
            tau_ref: 1e-3,
            points_per_period: 32,
        }
    }
}

impl ModalBasis {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// Modal coordinates `W^T M v`.
    pub fn project(&self, v: &DVector<f64>) -> DVector<f64> {
        self.mass_vectors.tr_mul(v)
    }

    /// Exact solution `(u(t), z(t))` of `M u'' + K u = b(t)`. The forced part
    /// is integrated by composite Simpson.
    pub fn solution(
        &self,
        u0: &DVector<f64>,
        z0: &DVector<f64>,
        load: &dyn Load,
        t: f64,
        options: ModalOptions,
    ) -> (DVector<f64>, DVector<f64>) {
        let (a, b) = self.modal_coordinates(u0, z0, load, t, options);
        (&self.vectors * a, &self.vectors * b)
    }

    /// Modal coordinates of displacement and velocity at time `t`.
    pub fn modal_coordinates(
        &self,
        u0: &DVector<f64>,
        z0: &DVector<f64>,
        load: &dyn Load,
        t: f64,
        options: ModalOptions,
    ) -> (DVector<f64>, DVector<f64>) {
        let c = self.project(u0);
        let d = self.project(z0);
        let mu = &self.frequencies;
        let n = self.len();
        let mut u = DVector::from_fn(n, |i, _| c[i] * (mu[i] * t).cos() + d[i] / mu[i] * (mu[i] * t).sin());
        let mut z = DVector::from_fn(n, |i, _| -c[i] * mu[i] * (mu[i] * t).sin() + d[i] * (mu[i] * t).cos());
        if t <= 0.0 || n == 0 {
            return (u, z);
        }

        let mu_max = mu.max();
        let h_max = options.tau_ref.min(2.0 * PI / (mu_max * options.points_per_period as f64));
        let mut intervals = (t / h_max).ceil() as usize;
        intervals += intervals % 2;
        let h = t / intervals as f64;
        let mut sin_acc = DVector::<f64>::zeros(n);
        let mut cos_acc = DVector::<f64>::zeros(n);
        let mut b = DVector::zeros(load.dim());
        for j in 0..=intervals {
            let s = j as f64 * h;
            let w = if j == 0 || j == intervals {
                1.0
            } else if j % 2 == 1 {
                4.0
            } else {
                2.0
            };
            load.eval_into(s, &mut b);
            if b.iter().all(|&v| v == 0.0) {
                continue;
            }
            let g = self.vectors.tr_mul(&b);
            for i in 0..n {
                let phase = mu[i] * (t - s);
                sin_acc[i] += w * g[i] * phase.sin();
                cos_acc[i] += w * g[i] * phase.cos();
            }
        }
        for i in 0..n {
            u[i] += h / 3.0 * sin_acc[i] / mu[i];
            z[i] += h / 3.0 * cos_acc[i];
        }
        (u, z)
    }

    /// `(u^T K u + z^T M z)^{1/2}` from modal coordinates.
    pub fn modal_energy(&self, u: &DVector<f64>, z: &DVector<f64>) -> f64 {
        (0..self.len())
            .map(|i| self.eigenvalues[i] * u[i] * u[i] + z[i] * z[i])
            .sum::<f64>()
            .sqrt()
    }

    /// `index,lambda,mu` table.
    pub fn eigenvalue_csv(&self) -> String {
        let mut s = String::from("index,lambda,mu\n");
        for i in 0..self.len() {
            let _ = writeln!(s, "{},{:.16e},{:.16e}", i, self.eigenvalues[i], self.frequencies[i]);
        }
        s
    }

    pub fn write_eigenvalues_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.eigenvalue_csv())?;
        Ok(())
    }
}

/// Modal solution at time `t` as DOF vectors `(u, z)`.
pub fn modal_solution(
    basis: &ModalBasis,
    u0: &DVector<f64>,
    z0: &DVector<f64>,
    load: &dyn Load,
    t: f64,
    options: ModalOptions,
) -> (DVector<f64>, DVector<f64>) {
    basis.solution(u0, z0, load, t, options)
}
