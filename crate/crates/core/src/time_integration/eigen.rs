use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::assembly::DiscreteSystem;
use crate::error::{Error, Result};
use crate::linalg::{CscMatrix, SparseCholesky};

/// Condition estimate of `M` above which the largest eigenvalue is reported unbounded.
pub const SINGULAR_MASS_CONDITION: f64 = 1e14;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerOptions {
    /// Stop when the Rayleigh quotient changes by less than `tol` relative.
    pub tol: f64,
    pub max_iterations: usize,
}

impl Default for PowerOptions {
    fn default() -> Self {
        Self {
            tol: 1e-6,
            max_iterations: 200_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MaxEigenvalue {
    Bounded { lambda: f64, iterations: usize },
    /// `M` is numerically singular; `condition` is infinite when its factorization failed.
    Unbounded { condition: f64 },
}

impl MaxEigenvalue {
    pub fn value(&self) -> Option<f64> {
        match *self {
            MaxEigenvalue::Bounded { lambda, .. } => Some(lambda),
            MaxEigenvalue::Unbounded { .. } => None,
        }
    }

    pub fn is_unbounded(&self) -> bool {
        matches!(self, MaxEigenvalue::Unbounded { .. })
    }
}

/// Fixed pseudo-random start vector so estimates are reproducible.
fn start_vector(n: usize) -> DVector<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    DVector::from_fn(n, |_, _| rng.random::<f64>() + 0.5)
}

fn normalize_in(a: &CscMatrix, x: &mut DVector<f64>) {
    let s = a.quadratic_form(x).sqrt();
    *x /= s;
}

/// Power and inverse iteration on `M` alone. `None` when `M` cannot be factored.
pub fn mass_condition_estimate(system: &DiscreteSystem) -> Option<f64> {
    let m = &system.m;
    let factor = SparseCholesky::factor(m).ok()?;
    let n = m.nrows();
    if n == 0 {
        return Some(1.0);
    }
    let mut x = start_vector(n);
    x.normalize_mut();
    let mut hi = 0.0;
    for _ in 0..500 {
        let y = m.mul_vec(&x);
        let next = x.dot(&y);
        x = y.normalize();
        if (next - hi).abs() <= 1e-3 * next {
            hi = next;
            break;
        }
        hi = next;
    }
    let mut x = start_vector(n);
    x.normalize_mut();
    let mut lo = f64::INFINITY;
    for _ in 0..500 {
        let y = factor.solve(&x);
        let next = 1.0 / x.dot(&y);
        x = y.normalize();
        if !(next > 0.0) {
            return Some(f64::INFINITY);
        }
        if (next - lo).abs() <= 1e-3 * next {
            lo = next;
            break;
        }
        lo = next;
    }
    Some(hi / lo)
}

/// Largest generalized eigenvalue of `(K, M)` by power iteration on `M^{-1} K`.
pub fn estimate_max_eigenvalue(system: &DiscreteSystem) -> Result<MaxEigenvalue> {
    estimate_max_eigenvalue_with(system, PowerOptions::default())
}

pub fn estimate_max_eigenvalue_with(system: &DiscreteSystem, options: PowerOptions) -> Result<MaxEigenvalue> {
    let condition = mass_condition_estimate(system).unwrap_or(f64::INFINITY);
    if !(condition <= SINGULAR_MASS_CONDITION) {
        return Ok(MaxEigenvalue::Unbounded { condition });
    }
    let mass = SparseCholesky::factor(&system.m)?;
    let (k, m) = (&system.k, &system.m);
    let mut x = start_vector(system.ndof());
    normalize_in(m, &mut x);
    let mut lambda = 0.0;
    for it in 1..=options.max_iterations {
        let kx = k.mul_vec(&x);
        let next = x.dot(&kx);
        x = mass.solve(&kx);
        normalize_in(m, &mut x);
        if (next - lambda).abs() <= options.tol * next.abs() {
            return Ok(MaxEigenvalue::Bounded { lambda: next, iterations: it });
        }
        lambda = next;
    }
    Err(Error::NoConvergence {
        iterations: options.max_iterations,
        last: lambda,
    })
}

/// Smallest generalized eigenvalue of `(K, M)` by inverse iteration.
pub fn estimate_min_eigenvalue(system: &DiscreteSystem, tol: f64, max_iterations: usize) -> Result<f64> {
    let stiff = SparseCholesky::factor(&system.k)?;
    let (k, m) = (&system.k, &system.m);
    let mut x = start_vector(system.ndof());
    normalize_in(m, &mut x);
    let mut lambda = f64::INFINITY;
    for _ in 0..max_iterations {
        let next = k.quadratic_form(&x);
        x = stiff.solve(&m.mul_vec(&x));
        normalize_in(m, &mut x);
        if (next - lambda).abs() <= tol * next {
            return Ok(next);
        }
        lambda = next;
    }
    Err(Error::NoConvergence {
        iterations: max_iterations,
        last: lambda,
    })
}
