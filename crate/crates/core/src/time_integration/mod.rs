//! Time stepping for `M u'' + K u = b(t)`: the Newmark family and the
//! composite Bathe scheme, the CFL predicate and extremal eigenvalue estimates.

mod amplification;
mod bathe;
mod eigen;
mod load;
mod newmark;
mod output;

use nalgebra::DVector;

use crate::assembly::DiscreteSystem;
use crate::error::{Error, Result};

pub use amplification::{bathe_amplification, newmark_amplification, spectral_radius};
pub use bathe::{run_bathe, BatheStepper};
pub use eigen::{
    estimate_max_eigenvalue, estimate_max_eigenvalue_with, estimate_min_eigenvalue, mass_condition_estimate,
    MaxEigenvalue, PowerOptions, SINGULAR_MASS_CONDITION,
};
pub use load::{ConstantLoad, FnLoad, Load, PointPulse, SeparableLoad, ZeroLoad};
pub use newmark::{run_newmark, NewmarkStepper};
pub use output::{format_metadata, write_metadata, write_snapshots_csv};

/// Default CFL safety margin.
pub const DEFAULT_EPS: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewmarkParams {
    pub beta: f64,
    pub gamma: f64,
    pub tau: f64,
    /// Safety margin of the CFL predicate, in `(0, 1)`.
    pub eps: f64,
}

impl NewmarkParams {
    pub fn new(beta: f64, gamma: f64, tau: f64) -> Result<Self> {
        let p = Self {
            beta,
            gamma,
            tau,
            eps: DEFAULT_EPS,
        };
        p.validate()?;
        Ok(p)
    }

    /// Trapezoidal rule, `beta = 1/4`, `gamma = 1/2`.
    pub fn trapezoidal(tau: f64) -> Self {
        Self {
            beta: 0.25,
            gamma: 0.5,
            tau,
            eps: DEFAULT_EPS,
        }
    }

    pub fn with_eps(mut self, eps: f64) -> Result<Self> {
        self.eps = eps;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.beta >= 0.0) {
            return Err(Error::InvalidArgument(format!("beta = {} must be >= 0", self.beta)));
        }
        if !(self.gamma >= 0.5) {
            return Err(Error::InvalidArgument(format!("gamma = {} must be >= 1/2", self.gamma)));
        }
        if !(self.tau > 0.0 && self.tau.is_finite()) {
            return Err(Error::InvalidArgument(format!("tau = {} must be positive", self.tau)));
        }
        if !(self.eps > 0.0 && self.eps < 1.0) {
            return Err(Error::InvalidArgument(format!("eps = {} must lie in (0, 1)", self.eps)));
        }
        Ok(())
    }

    /// Whether stability needs the CFL restriction (`beta < gamma / 2`).
    pub fn conditionally_stable(&self) -> bool {
        self.beta < 0.5 * self.gamma
    }

    /// Upper bound on `lambda tau^2`: `(1 - eps) / (gamma/2 - beta)`, which is
    /// `4 (1 - eps) / (1 - 4 beta)` for `gamma = 1/2`. Infinite when unconditionally stable.
    pub fn cfl_bound(&self) -> f64 {
        if self.conditionally_stable() {
            (1.0 - self.eps) / (0.5 * self.gamma - self.beta)
        } else {
            f64::INFINITY
        }
    }
}

/// Check `lambda_max tau^2 <= cfl_bound`.
pub fn check_cfl(lambda_max: f64, params: &NewmarkParams) -> Result<()> {
    let lhs = lambda_max * params.tau * params.tau;
    let rhs = params.cfl_bound();
    if lhs <= rhs {
        Ok(())
    } else {
        Err(Error::Cfl {
            lambda_max,
            tau: params.tau,
            beta: params.beta,
            gamma: params.gamma,
            eps: params.eps,
            lhs,
            rhs,
        })
    }
}

/// Displacement, velocity and (when a mass factorization is available)
/// acceleration at step `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveState {
    pub u: DVector<f64>,
    pub z: DVector<f64>,
    /// Solves `M a = b(t) - K u`; `None` when the scheme never factors `M`.
    pub a: Option<DVector<f64>>,
    pub t: f64,
    pub n: usize,
}

impl WaveState {
    pub fn new(u: DVector<f64>, z: DVector<f64>) -> Self {
        assert_eq!(u.len(), z.len());
        Self {
            u,
            z,
            a: None,
            t: 0.0,
            n: 0,
        }
    }

    pub fn zeros(n: usize) -> Self {
        Self::new(DVector::zeros(n), DVector::zeros(n))
    }
}

/// `(u^T K u + z^T M z)^{1/2}`.
pub fn discrete_energy(system: &DiscreteSystem, state: &WaveState) -> f64 {
    let e = system.k.quadratic_form(&state.u) + system.m.quadratic_form(&state.z);
    e.max(0.0).sqrt()
}

/// What a run records besides the final state.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// States are stored at the steps nearest to these times.
    pub snapshot_times: Vec<f64>,
    /// Store the discrete energy after every step.
    pub record_energy: bool,
    /// Known `lambda_max` for the CFL check; estimated when absent.
    pub lambda_max: Option<f64>,
    /// Factor `M` to report accelerations even when the scheme does not need it.
    pub track_acceleration: bool,
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub scheme: String,
    pub tau: f64,
    pub steps: usize,
    /// Energy at `t_0, t_1, ...` when requested.
    pub energy: Vec<f64>,
    pub snapshots: Vec<WaveState>,
    pub final_state: WaveState,
}

/// Number of steps of size `tau` covering `[0, t_final]`.
pub fn step_count(tau: f64, t_final: f64) -> Result<usize> {
    if !(t_final >= 0.0) {
        return Err(Error::InvalidArgument(format!("final time {t_final} must be >= 0")));
    }
    let n = (t_final / tau).round();
    if (n * tau - t_final).abs() > 1e-9 * t_final.max(tau) {
        return Err(Error::InvalidArgument(format!(
            "tau = {tau} does not divide T = {t_final}"
        )));
    }
    Ok(n as usize)
}

/// One-step scheme with a fixed step size.
pub(crate) trait Stepper {
    fn name(&self) -> String;
    fn tau(&self) -> f64;
    fn prepare(&mut self, state: &mut WaveState, load: &dyn Load) -> Result<()>;
    fn step(&mut self, state: &mut WaveState, load: &dyn Load) -> Result<()>;
}

pub(crate) fn integrate(
    stepper: &mut dyn Stepper,
    system: &DiscreteSystem,
    initial: WaveState,
    load: &dyn Load,
    t_final: f64,
    options: &RunOptions,
) -> Result<Trajectory> {
    let n = system.ndof();
    if initial.u.len() != n || initial.z.len() != n || load.dim() != n {
        return Err(Error::InvalidArgument(format!(
            "initial data and load must have {n} entries"
        )));
    }
    let tau = stepper.tau();
    let steps = step_count(tau, t_final)?;
    let mut wanted: Vec<usize> = options
        .snapshot_times
        .iter()
        .map(|&t| ((t / tau).round().max(0.0) as usize).min(steps))
        .collect();
    wanted.sort_unstable();

    let mut state = initial;
    state.n = 0;
    state.t = 0.0;
    stepper.prepare(&mut state, load)?;
    let mut energy = Vec::new();
    let mut snapshots = Vec::new();
    let mut next = 0;
    let mut record = |state: &WaveState, energy: &mut Vec<f64>, snapshots: &mut Vec<WaveState>| {
        if options.record_energy {
            energy.push(discrete_energy(system, state));
        }
        while next < wanted.len() && wanted[next] == state.n {
            snapshots.push(state.clone());
            next += 1;
        }
    };
    record(&state, &mut energy, &mut snapshots);
    for _ in 0..steps {
        stepper.step(&mut state, load)?;
        record(&state, &mut energy, &mut snapshots);
    }
    Ok(Trajectory {
        scheme: stepper.name(),
        tau,
        steps,
        energy,
        snapshots,
        final_state: state,
    })
}
