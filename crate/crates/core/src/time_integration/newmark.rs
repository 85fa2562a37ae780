use nalgebra::DVector;

use super::{check_cfl, estimate_max_eigenvalue, integrate, Load, MaxEigenvalue, NewmarkParams, RunOptions, Stepper, Trajectory, WaveState};
use crate::assembly::DiscreteSystem;
use crate::error::{Error, Result};
use crate::linalg::SparseCholesky;

/// Newmark scheme in two-field form:
///
/// `M (u1 - u0 - tau z0) / tau^2 + K (beta u1 + (1/2 - beta) u0) = beta f1 + (1/2 - beta) f0`
/// `M (z1 - z0) / tau + K (gamma u1 + (1 - gamma) u0) = gamma f1 + (1 - gamma) f0`
///
/// with `M + beta tau^2 K` factored once. When `gamma = 2 beta` the second
/// equation follows from the first and needs no mass solve.
pub struct NewmarkStepper<'a> {
    system: &'a DiscreteSystem,
    params: NewmarkParams,
    lhs: SparseCholesky,
    mass: Option<SparseCholesky>,
    mass_free: bool,
    /// Load at the current step, carried over from the previous step.
    f_now: DVector<f64>,
    f_next: DVector<f64>,
}

impl<'a> NewmarkStepper<'a> {
    pub fn new(system: &'a DiscreteSystem, params: NewmarkParams, track_acceleration: bool) -> Result<Self> {
        params.validate()?;
        let tau2 = params.tau * params.tau;
        let lhs = SparseCholesky::factor(&system.m.linear_combination(1.0, &system.k, params.beta * tau2))?;
        let mass_free = params.beta > 0.0 && (params.gamma - 2.0 * params.beta).abs() <= 1e-14;
        let mass = if !mass_free || track_acceleration {
            Some(if params.beta == 0.0 { lhs.clone() } else { SparseCholesky::factor(&system.m)? })
        } else {
            None
        };
        let n = system.ndof();
        Ok(Self {
            system,
            params,
            lhs,
            mass,
            mass_free,
            f_now: DVector::zeros(n),
            f_next: DVector::zeros(n),
        })
    }

    fn acceleration(&self, f: &DVector<f64>, u: &DVector<f64>) -> Option<DVector<f64>> {
        self.mass.as_ref().map(|m| m.solve(&(f - self.system.k.mul_vec(u))))
    }
}

impl Stepper for NewmarkStepper<'_> {
    fn name(&self) -> String {
        format!("newmark(beta={},gamma={})", self.params.beta, self.params.gamma)
    }

    fn tau(&self) -> f64 {
        self.params.tau
    }

    fn prepare(&mut self, state: &mut WaveState, load: &dyn Load) -> Result<()> {
        load.eval_into(state.t, &mut self.f_now);
        state.a = self.acceleration(&self.f_now, &state.u);
        Ok(())
    }

    fn step(&mut self, state: &mut WaveState, load: &dyn Load) -> Result<()> {
        let NewmarkParams { beta, gamma, tau, .. } = self.params;
        let tau2 = tau * tau;
        let t1 = (state.n + 1) as f64 * tau;
        load.eval_into(t1, &mut self.f_next);
        let k = &self.system.k;
        let m = &self.system.m;

        let r0 = &self.f_now - k.mul_vec(&state.u);
        let predictor = &state.u + &state.z * tau;
        let rhs = m.mul_vec(&predictor) + (&self.f_next * beta + &r0 * (0.5 - beta)) * tau2;
        let u1 = self.lhs.solve(&rhs);

        let z1 = if self.mass_free {
            &state.z + (&u1 - &predictor) * (gamma / (beta * tau))
        } else {
            let r1 = &self.f_next - k.mul_vec(&u1);
            let mass = self.mass.as_ref().expect("mass factor exists when gamma != 2 beta");
            &state.z + mass.solve(&(r0 * (1.0 - gamma) + r1 * gamma)) * tau
        };
        state.a = self.acceleration(&self.f_next, &u1);
        state.u = u1;
        state.z = z1;
        state.n += 1;
        state.t = t1;
        std::mem::swap(&mut self.f_now, &mut self.f_next);
        Ok(())
    }
}

/// Run Newmark from `(u0, z0)` to `t_final`. Conditionally stable parameter
/// choices are refused when `lambda_max tau^2` violates the CFL bound.
pub fn run_newmark(
    system: &DiscreteSystem,
    params: NewmarkParams,
    u0: &DVector<f64>,
    z0: &DVector<f64>,
    load: &dyn Load,
    t_final: f64,
    options: &RunOptions,
) -> Result<Trajectory> {
    params.validate()?;
    if params.conditionally_stable() {
        let lambda = match options.lambda_max {
            Some(l) => l,
            None => match estimate_max_eigenvalue(system)? {
                MaxEigenvalue::Bounded { lambda, .. } => lambda,
                MaxEigenvalue::Unbounded { .. } => return Err(Error::UnboundedSpectrum),
            },
        };
        check_cfl(lambda, &params)?;
    }
    let mut stepper = NewmarkStepper::new(system, params, options.track_acceleration)?;
    integrate(
        &mut stepper,
        system,
        WaveState::new(u0.clone(), z0.clone()),
        load,
        t_final,
        options,
    )
}
