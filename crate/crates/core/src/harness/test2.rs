use std::fmt::Write as _;

use nalgebra::DVector;

use super::{at, oscillation_index, diagonal_slice, write_file, Scheme, SlicePoint, StudyConfig};
use crate::assembly::{assemble, DiscreteSystem};
use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::time_integration::{
    format_metadata, run_bathe, run_newmark, NewmarkParams, PointPulse, RunOptions, Trajectory,
};

/// The source switches off at this time.
pub const PULSE_DURATION: f64 = 0.1;

fn source_location() -> Point {
    Point::new(0.05, 0.05)
}

#[derive(Debug, Clone)]
pub struct Test2Run {
    pub scheme: Scheme,
    pub tau: f64,
    /// Total variation of the velocity along the diagonal at the final time.
    pub oscillation_index: f64,
    /// Energy `(u^T K u + z^T M z)^{1/2}` at every step.
    pub energy: Vec<f64>,
    /// `max |E_n - E_ref| / E_ref` over steps after the source has switched off.
    pub energy_drift_after_pulse: f64,
    /// Energy never grows (up to round-off) once the source is off.
    pub energy_monotone_after_pulse: bool,
    pub slice: Vec<SlicePoint>,
    pub u_full: DVector<f64>,
    pub z_full: DVector<f64>,
}

#[derive(Debug, Clone)]
pub struct Test2Report {
    pub h: f64,
    pub ndof: usize,
    /// Global index of the loaded DOF.
    pub source_dof: usize,
    pub source_point: Point,
    pub runs: Vec<Test2Run>,
}

impl Test2Report {
    pub fn run(&self, scheme: Scheme, tau: f64) -> Option<&Test2Run> {
        self.runs.iter().find(|r| r.scheme == scheme && (r.tau - tau).abs() < 1e-14)
    }
}

/// First step index whose update no longer sees the source.
fn quiet_index(tau: f64) -> usize {
    (PULSE_DURATION / tau - 1e-9).ceil() as usize
}

fn energy_summary(energy: &[f64], tau: f64) -> (f64, bool) {
    let n0 = quiet_index(tau);
    if n0 >= energy.len() {
        return (0.0, true);
    }
    let tail = &energy[n0..];
    let reference = tail[0];
    let drift = if reference > 0.0 {
        tail.iter().map(|e| (e - reference).abs()).fold(0.0, f64::max) / reference
    } else {
        0.0
    };
    let monotone = tail.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12) + 1e-300);
    (drift, monotone)
}

fn integrate(system: &DiscreteSystem, scheme: Scheme, tau: f64, load: &PointPulse, t_final: f64) -> Result<Trajectory> {
    let zero = DVector::zeros(system.ndof());
    let options = RunOptions {
        record_energy: true,
        ..Default::default()
    };
    match scheme {
        Scheme::Newmark => run_newmark(system, NewmarkParams::trapezoidal(tau), &zero, &zero, load, t_final, &options),
        Scheme::Bathe => run_bathe(system, tau, &zero, &zero, load, t_final, &options),
    }
}

/// Point-source propagation: a nodal pulse near the corner of the unit square
/// is integrated by the trapezoidal rule and by the Bathe scheme for every
/// time step, and the velocity along the diagonal is compared.
pub fn run_test2(config: &StudyConfig) -> Result<Test2Report> {
    config.validate()?;
    let h = config.h_list[0];
    let mesh = config.mesh.build(h, config.seed).map_err(|e| at(h, f64::NAN, e))?;
    let system = assemble(&mesh, config.k, config.mass_mode).map_err(|e| at(h, f64::NAN, e))?;
    let layout = &system.layout;
    let free = layout
        .nearest_free_dof(&source_location())
        .ok_or_else(|| Error::InvalidArgument("mesh has no free point-value DOF for the source".into()))?;
    let source_dof = layout.free_dofs()[free];
    let source_point = layout.points[source_dof].expect("point DOF");
    let load = PointPulse {
        dim: system.ndof(),
        index: free,
        amplitude: config.amplitude,
        t_off: PULSE_DURATION,
    };
    log::info!("test2 ndof={} source dof {} at {:?}", system.ndof(), source_dof, source_point);

    let mut runs = Vec::new();
    for &tau in &config.tau_list {
        for scheme in [Scheme::Newmark, Scheme::Bathe] {
            let traj = integrate(&system, scheme, tau, &load, config.t_final).map_err(|e| at(h, tau, e))?;
            let u_full = layout.extend(&traj.final_state.u);
            let z_full = layout.extend(&traj.final_state.z);
            let slice = diagonal_slice(&system, &u_full, &z_full);
            let (drift, monotone) = energy_summary(&traj.energy, tau);
            runs.push(Test2Run {
                scheme,
                tau,
                oscillation_index: oscillation_index(&slice),
                energy: traj.energy,
                energy_drift_after_pulse: drift,
                energy_monotone_after_pulse: monotone,
                slice,
                u_full,
                z_full,
            });
        }
    }
    let report = Test2Report {
        h,
        ndof: system.ndof(),
        source_dof,
        source_point,
        runs,
    };
    if let Some(dir) = &config.out_dir {
        for run in &report.runs {
            let tag = format!("{}_{}", run.scheme.as_str(), tau_tag(run.tau));
            write_file(dir, &format!("slice_{tag}.csv"), &slice_csv(&run.slice))?;
            let sub = dir.join(format!("tau_{}", tau_tag(run.tau)));
            let name = format!("snapshot_{}_{}.csv", run.scheme.as_str(), config.t_final);
            write_file(&sub, &name, &snapshot_csv(&system, &run.u_full, &run.z_full))?;
        }
        write_file(dir, "meta.txt", &format_metadata(&test2_metadata(config, &report)))?;
    }
    Ok(report)
}

fn tau_tag(tau: f64) -> String {
    format!("{tau}")
}

pub fn slice_csv(points: &[SlicePoint]) -> String {
    let mut s = String::from("s,u,z\n");
    for p in points {
        let _ = writeln!(s, "{:.12e},{:.12e},{:.12e}", p.s, p.u, p.z);
    }
    s
}

/// Values at every point DOF, boundary included.
pub fn snapshot_csv(system: &DiscreteSystem, u_full: &DVector<f64>, z_full: &DVector<f64>) -> String {
    let mut s = String::from("x,y,u,z\n");
    for (g, p) in system.layout.points.iter().enumerate() {
        if let Some(p) = p {
            let _ = writeln!(s, "{:.12e},{:.12e},{:.12e},{:.12e}", p.x, p.y, u_full[g], z_full[g]);
        }
    }
    s
}

fn test2_metadata(config: &StudyConfig, report: &Test2Report) -> Vec<(String, String)> {
    let mut m: Vec<(String, String)> = vec![
        ("test".into(), "test2".into()),
        ("k".into(), config.k.to_string()),
        ("mesh_family".into(), config.mesh.as_str().into()),
        ("h".into(), report.h.to_string()),
        ("ndof".into(), report.ndof.to_string()),
        ("mass_mode".into(), config.mass_mode.as_str().into()),
        ("t_final".into(), config.t_final.to_string()),
        (
            "source".into(),
            format!(
                "nodal load {} on the free DOF nearest (0.05, 0.05), lowest index on ties, while t < {}",
                config.amplitude, PULSE_DURATION
            ),
        ),
        ("source_dof".into(), report.source_dof.to_string()),
        ("source_point".into(), format!("{} {}", report.source_point.x, report.source_point.y)),
        ("newmark".into(), "beta = 0.25, gamma = 0.5".into()),
        ("threads".into(), rayon::current_num_threads().to_string()),
    ];
    for run in &report.runs {
        let p = format!("{}_{}", run.scheme.as_str(), tau_tag(run.tau));
        m.push((format!("{p}.oscillation_index"), format!("{:.10e}", run.oscillation_index)));
        m.push((format!("{p}.energy_drift_after_pulse"), format!("{:.3e}", run.energy_drift_after_pulse)));
        m.push((format!("{p}.energy_monotone_after_pulse"), run.energy_monotone_after_pulse.to_string()));
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quiet_index_is_first_step_past_the_pulse() {
        assert_eq!(quiet_index(1.0 / 20.0), 2);
        assert_eq!(quiet_index(1.0 / 40.0), 4);
        assert_eq!(quiet_index(0.03), 4);
    }

    #[test]
    fn tags() {
        assert_eq!(tau_tag(1.0 / 20.0), "0.05");
        assert_eq!(tau_tag(1.0 / 80.0), "0.0125");
    }

    #[test]
    fn energy_summary_flags_growth() {
        let (d, m) = energy_summary(&[0.0, 1.0, 2.0, 2.0, 1.9], 0.05);
        assert!(m && (d - 0.05).abs() < 1e-12);
        let (_, m) = energy_summary(&[0.0, 1.0, 2.0, 2.1], 0.05);
        assert!(!m);
    }
}
