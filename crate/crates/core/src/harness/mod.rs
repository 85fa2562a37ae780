//! End-to-end studies: the manufactured-solution convergence study (Test 1),
//! the patch test and the point-source propagation study (Test 2).

mod slice;
mod test1;
mod test2;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::mesh::{generate_grid_mesh, generate_voronoi_mesh, PolygonalMesh};
use crate::vem::MassMode;

pub use slice::{diagonal_slice, oscillation_index, SlicePoint};
pub use test1::{run_patch_test, run_test1, MeshInfo, PatchResult, Test1Report};
pub use test2::{run_test2, slice_csv, snapshot_csv, Test2Report, Test2Run, PULSE_DURATION};

/// `h_mean sqrt(n)` of Lloyd-relaxed Voronoi meshes of the unit square.
pub const VORONOI_SIZE_CONSTANT: f64 = 1.30;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    Newmark,
    Bathe,
}

impl Scheme {
    pub fn as_str(self) -> &'static str {
        match self {
            Scheme::Newmark => "newmark",
            Scheme::Bathe => "bathe",
        }
    }
}

impl FromStr for Scheme {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "newmark" => Ok(Scheme::Newmark),
            "bathe" => Ok(Scheme::Bathe),
            other => Err(format!("unknown scheme {other:?} (expected newmark or bathe)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeshFamily {
    /// Lloyd-relaxed Voronoi meshes whose mean cell diameter is close to `h`.
    Voronoi { lloyd_iters: usize },
    /// Uniform `n x n` grids with `n = round(1/h)`.
    Grid,
}

impl MeshFamily {
    pub fn as_str(self) -> &'static str {
        match self {
            MeshFamily::Voronoi { .. } => "voronoi",
            MeshFamily::Grid => "grid",
        }
    }

    /// Mesh of target size `h`.
    pub fn build(self, h: f64, seed: u64) -> Result<PolygonalMesh> {
        if !(h > 0.0 && h <= 1.0) {
            return Err(Error::InvalidArgument(format!("mesh size h = {h} must lie in (0, 1]")));
        }
        match self {
            MeshFamily::Voronoi { lloyd_iters } => {
                let n = ((VORONOI_SIZE_CONSTANT / h).powi(2)).round().max(1.0) as usize;
                generate_voronoi_mesh(n, seed, lloyd_iters)
            }
            MeshFamily::Grid => generate_grid_mesh((1.0 / h).round().max(1.0) as usize),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TestId {
    Test1,
    Test2,
}

/// Configuration of a study.
#[derive(Debug, Clone, PartialEq)]
pub struct StudyConfig {
    pub test: TestId,
    pub k: usize,
    pub mesh: MeshFamily,
    pub h_list: Vec<f64>,
    pub tau_list: Vec<f64>,
    pub scheme: Scheme,
    pub beta: f64,
    pub gamma: f64,
    pub mass_mode: MassMode,
    pub t_final: f64,
    pub seed: u64,
    /// Artifacts are written here when set.
    pub out_dir: Option<PathBuf>,
    /// Wall-clock seconds in `errors.csv`; zero when disabled so output is byte-reproducible.
    pub record_timing: bool,
    /// Estimate `lambda_max` of every mesh for the run metadata.
    pub report_lambda_max: bool,
    /// Test 2 source amplitude.
    pub amplitude: f64,
}

impl StudyConfig {
    /// Test 1 defaults: Voronoi meshes h = 1/5 ... 1/40, Newmark trapezoidal, T = 1.
    pub fn test1(k: usize) -> Self {
        Self {
            test: TestId::Test1,
            k,
            mesh: MeshFamily::Voronoi { lloyd_iters: 50 },
            h_list: vec![1.0 / 5.0, 1.0 / 10.0, 1.0 / 20.0, 1.0 / 40.0],
            tau_list: vec![1.0 / 160.0],
            scheme: Scheme::Newmark,
            beta: 0.25,
            gamma: 0.5,
            mass_mode: MassMode::Stabilized,
            t_final: 1.0,
            seed: 1,
            out_dir: None,
            record_timing: true,
            report_lambda_max: false,
            amplitude: 0.0,
        }
    }

    /// Test 2 defaults: 50 x 50 grid, k = 1, T = 1.2, tau = 1/20, 1/40, 1/80.
    pub fn test2() -> Self {
        Self {
            test: TestId::Test2,
            k: 1,
            mesh: MeshFamily::Grid,
            h_list: vec![1.0 / 50.0],
            tau_list: vec![1.0 / 20.0, 1.0 / 40.0, 1.0 / 80.0],
            scheme: Scheme::Newmark,
            beta: 0.25,
            gamma: 0.5,
            mass_mode: MassMode::Stabilized,
            t_final: 1.2,
            seed: 0,
            out_dir: None,
            record_timing: true,
            report_lambda_max: false,
            amplitude: 100.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=3).contains(&self.k) {
            return Err(Error::InvalidArgument(format!("k = {} is not in 1..=3", self.k)));
        }
        if self.h_list.is_empty() || self.tau_list.is_empty() {
            return Err(Error::InvalidArgument("h and tau lists must be non-empty".into()));
        }
        if let Some(bad) = self.h_list.iter().chain(&self.tau_list).find(|v| !(**v > 0.0 && v.is_finite())) {
            return Err(Error::InvalidArgument(format!("list entry {bad} must be positive")));
        }
        if !(self.t_final > 0.0) {
            return Err(Error::InvalidArgument(format!("final time {} must be positive", self.t_final)));
        }
        Ok(())
    }
}

/// Final-time errors of one `(h, tau)` run.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorRecord {
    pub h_max: f64,
    pub h_mean: f64,
    pub tau: f64,
    /// Relative discrete H1 seminorm error of `u_I - u_h`.
    pub e1: f64,
    /// Relative discrete L2 error of `u_I - u_h`.
    pub e0: f64,
    pub seconds: f64,
    pub ndof: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateRecord {
    /// `"E1"` or `"E0"`.
    pub norm: &'static str,
    pub tau: f64,
    pub h_coarse: f64,
    pub h_fine: f64,
    pub rate: f64,
    /// `k` for E1 and `k + 1` for E0.
    pub expected: f64,
    /// `|rate - expected| > 0.25`.
    pub flagged: bool,
}

/// Tolerance on a measured rate.
pub const RATE_TOLERANCE: f64 = 0.25;

/// Observed orders between successive meshes sharing a time step, using the
/// largest cell diameter: `log(e_c / e_f) / log(h_c / h_f)`.
pub fn compute_rates(records: &[ErrorRecord], k: usize) -> Result<Vec<RateRecord>> {
    let mut taus: Vec<f64> = records.iter().map(|r| r.tau).collect();
    taus.sort_by(|a, b| b.total_cmp(a));
    taus.dedup();
    let mut out = Vec::new();
    for tau in taus {
        let group: Vec<&ErrorRecord> = records.iter().filter(|r| r.tau == tau).collect();
        for w in group.windows(2) {
            let (c, f) = (w[0], w[1]);
            if !(f.h_max < c.h_max) {
                return Err(Error::InvalidArgument(format!(
                    "mesh sizes must decrease within a tau group (tau = {tau}: h = {} then {})",
                    c.h_max, f.h_max
                )));
            }
            let lh = (c.h_max / f.h_max).ln();
            for (norm, ec, ef, expected) in [("E1", c.e1, f.e1, k as f64), ("E0", c.e0, f.e0, k as f64 + 1.0)] {
                let rate = (ec / ef).ln() / lh;
                out.push(RateRecord {
                    norm,
                    tau,
                    h_coarse: c.h_max,
                    h_fine: f.h_max,
                    rate,
                    expected,
                    flagged: !((rate - expected).abs() <= RATE_TOLERANCE),
                });
            }
        }
    }
    Ok(out)
}

pub fn errors_csv(records: &[ErrorRecord]) -> String {
    let mut s = String::from("h_max,h_mean,tau,E1,E0,seconds\n");
    for r in records {
        let _ = writeln!(
            s,
            "{:.10e},{:.10e},{:.10e},{:.10e},{:.10e},{:.3}",
            r.h_max, r.h_mean, r.tau, r.e1, r.e0, r.seconds
        );
    }
    s
}

/// Rates at the smallest time step.
pub fn rates_csv(rates: &[RateRecord]) -> String {
    let mut s = String::from("norm,h_coarse,h_fine,rate\n");
    let tau_min = rates.iter().map(|r| r.tau).fold(f64::INFINITY, f64::min);
    for norm in ["E1", "E0"] {
        for r in rates.iter().filter(|r| r.tau == tau_min && r.norm == norm) {
            let _ = writeln!(s, "{},{:.10e},{:.10e},{:.6}", r.norm, r.h_coarse, r.h_fine, r.rate);
        }
    }
    s
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join(name), contents)?;
    Ok(())
}

/// Wrap an error with the study cell that produced it.
fn at(h: f64, tau: f64, e: Error) -> Error {
    Error::Study {
        h,
        tau,
        source: Box::new(e),
    }
}
