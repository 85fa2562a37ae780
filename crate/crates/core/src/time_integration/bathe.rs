use nalgebra::DVector;

use super::{integrate, Load, RunOptions, Stepper, Trajectory, WaveState};
use crate::assembly::DiscreteSystem;
use crate::error::Result;
use crate::linalg::SparseCholesky;

/// Composite Bathe scheme. Each step is a trapezoidal substep over `tau/2`
/// with `(M + tau^2/16 K)`, then a three-point backward difference over
/// `(t_n, t_n + tau/2, t_n + tau)` with `(9 M + tau^2 K)`.
pub struct BatheStepper<'a> {
    system: &'a DiscreteSystem,
    tau: f64,
    lhs_half: SparseCholesky,
    lhs_full: SparseCholesky,
    f_now: DVector<f64>,
    f_half: DVector<f64>,
    f_next: DVector<f64>,
}

impl<'a> BatheStepper<'a> {
    pub fn new(system: &'a DiscreteSystem, tau: f64) -> Result<Self> {
        if !(tau > 0.0 && tau.is_finite()) {
            return Err(crate::Error::InvalidArgument(format!("tau = {tau} must be positive")));
        }
        let tau2 = tau * tau;
        let lhs_half = SparseCholesky::factor(&system.m.linear_combination(1.0, &system.k, tau2 / 16.0))?;
        let lhs_full = SparseCholesky::factor(&system.m.linear_combination(9.0, &system.k, tau2))?;
        let n = system.ndof();
        Ok(Self {
            system,
            tau,
            lhs_half,
            lhs_full,
            f_now: DVector::zeros(n),
            f_half: DVector::zeros(n),
            f_next: DVector::zeros(n),
        })
    }
}

impl Stepper for BatheStepper<'_> {
    fn name(&self) -> String {
        "bathe".into()
    }

    fn tau(&self) -> f64 {
        self.tau
    }

    fn prepare(&mut self, state: &mut WaveState, load: &dyn Load) -> Result<()> {
        load.eval_into(state.t, &mut self.f_now);
        state.a = None;
        Ok(())
    }

    fn step(&mut self, state: &mut WaveState, load: &dyn Load) -> Result<()> {
        let tau = self.tau;
        let s = 0.5 * tau;
        let t0 = state.n as f64 * tau;
        let t1 = (state.n + 1) as f64 * tau;
        load.eval_into(t0 + s, &mut self.f_half);
        load.eval_into(t1, &mut self.f_next);
        let k = &self.system.k;
        let m = &self.system.m;
        let (u0, z0) = (&state.u, &state.z);

        let rhs = m.mul_vec(&(u0 + z0 * s)) + (&self.f_half + &self.f_now - k.mul_vec(u0)) * (s * s / 4.0);
        let uh = self.lhs_half.solve(&rhs);
        let zh = (&uh - u0) * (2.0 / s) - z0;

        let back = (u0 - &uh * 4.0) * 3.0 + (z0 - &zh * 4.0) * tau;
        let rhs = &self.f_next * (tau * tau) - m.mul_vec(&back);
        let u1 = self.lhs_full.solve(&rhs);
        let z1 = (u0 - &uh * 4.0 + &u1 * 3.0) / tau;

        state.u = u1;
        state.z = z1;
        state.n += 1;
        state.t = t1;
        std::mem::swap(&mut self.f_now, &mut self.f_next);
        Ok(())
    }
}

/// Run the Bathe scheme from `(u0, z0)` to `t_final`.
pub fn run_bathe(
    system: &DiscreteSystem,
    tau: f64,
    u0: &DVector<f64>,
    z0: &DVector<f64>,
    load: &dyn Load,
    t_final: f64,
    options: &RunOptions,
) -> Result<Trajectory> {
    let mut stepper = BatheStepper::new(system, tau)?;
    integrate(
        &mut stepper,
        system,
        WaveState::new(u0.clone(), z0.clone()),
        load,
        t_final,
        options,
    )
}
