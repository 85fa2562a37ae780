//! Time-dependent load vectors on the free DOFs.

use nalgebra::DVector;

/// A load vector `b(t)` of fixed dimension.
pub trait Load: Sync {
    fn dim(&self) -> usize;

    /// Write `b(t)` into `out`.
    fn eval_into(&self, t: f64, out: &mut DVector<f64>);

    fn eval(&self, t: f64) -> DVector<f64> {
        let mut out = DVector::zeros(self.dim());
        self.eval_into(t, &mut out);
        out
    }
}

/// `b(t) = 0`.
#[derive(Debug, Clone, Copy)]
pub struct ZeroLoad(pub usize);

impl Load for ZeroLoad {
    fn dim(&self) -> usize {
        self.0
    }

    fn eval_into(&self, _t: f64, out: &mut DVector<f64>) {
        out.fill(0.0);
    }
}

/// `b(t) = b`.
#[derive(Debug, Clone)]
pub struct ConstantLoad(pub DVector<f64>);

impl Load for ConstantLoad {
    fn dim(&self) -> usize {
        self.0.len()
    }

    fn eval_into(&self, _t: f64, out: &mut DVector<f64>) {
        out.copy_from(&self.0);
    }
}

/// `b(t) = g(t) b_s` for a fixed spatial vector `b_s`.
#[derive(Debug, Clone)]
pub struct SeparableLoad<G> {
    pub shape: DVector<f64>,
    pub g: G,
}

impl<G: Fn(f64) -> f64 + Sync> Load for SeparableLoad<G> {
    fn dim(&self) -> usize {
        self.shape.len()
    }

    fn eval_into(&self, t: f64, out: &mut DVector<f64>) {
        out.copy_from(&self.shape);
        *out *= (self.g)(t);
    }
}

/// Nodal source of size `amplitude` on one DOF, active while `t < t_off`.
#[derive(Debug, Clone, Copy)]
pub struct PointPulse {
    pub dim: usize,
    pub index: usize,
    pub amplitude: f64,
    pub t_off: f64,
}

impl Load for PointPulse {
    fn dim(&self) -> usize {
        self.dim
    }

    fn eval_into(&self, t: f64, out: &mut DVector<f64>) {
        out.fill(0.0);
        if t < self.t_off {
            out[self.index] = self.amplitude;
        }
    }
}

/// Load given by a closure returning the whole vector.
#[derive(Debug, Clone)]
pub struct FnLoad<F> {
    pub dim: usize,
    pub f: F,
}

impl<F: Fn(f64) -> DVector<f64> + Sync> Load for FnLoad<F> {
    fn dim(&self) -> usize {
        self.dim
    }

    fn eval_into(&self, t: f64, out: &mut DVector<f64>) {
        out.copy_from(&(self.f)(t));
    }
}
