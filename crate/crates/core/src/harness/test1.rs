use std::f64::consts::PI;
use std::time::Instant;

use nalgebra::DVector;

use super::{at, compute_rates, errors_csv, rates_csv, write_file, ErrorRecord, RateRecord, Scheme, StudyConfig};
use crate::assembly::{assemble, DiscreteSystem};
use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::mesh::PolygonalMesh;
use crate::time_integration::{
    estimate_max_eigenvalue, format_metadata, mass_condition_estimate, run_bathe, run_newmark, ConstantLoad, Load,
    MaxEigenvalue, NewmarkParams, RunOptions, SeparableLoad, SINGULAR_MASS_CONDITION,
};

/// Per-mesh facts recorded by Test 1.
#[derive(Debug, Clone, PartialEq)]
pub struct MeshInfo {
    pub h_max: f64,
    pub h_mean: f64,
    pub cells: usize,
    pub ndof: usize,
    /// Condition estimate of the free-block mass matrix; infinite when it cannot be factored.
    pub mass_condition: f64,
    /// `mass_condition > 1e14`: the largest eigenvalue is treated as unbounded.
    pub singular_mass: bool,
    pub lambda_max: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct Test1Report {
    pub records: Vec<ErrorRecord>,
    pub rates: Vec<RateRecord>,
    pub meshes: Vec<MeshInfo>,
}

fn spatial_shape(p: &Point) -> f64 {
    (PI * p.x).sin() * (PI * p.y).sin()
}

/// Time factor of `f = u_tt - Delta u` for `u = sin(t^2) sin(pi x) sin(pi y)`.
fn load_time_factor(t: f64) -> f64 {
    let (s, c) = (t * t).sin_cos();
    2.0 * c - 4.0 * t * t * s + 2.0 * PI * PI * s
}

fn integrate_scheme(
    system: &DiscreteSystem,
    config: &StudyConfig,
    tau: f64,
    load: &dyn Load,
    lambda_max: Option<f64>,
) -> Result<DVector<f64>> {
    let zero = DVector::zeros(system.ndof());
    let (u0, z0, t_final) = (&zero, &zero, config.t_final);
    let options = RunOptions {
        lambda_max,
        ..Default::default()
    };
    let traj = match config.scheme {
        Scheme::Newmark => {
            let params = NewmarkParams::new(config.beta, config.gamma, tau)?;
            run_newmark(system, params, u0, z0, load, t_final, &options)?
        }
        Scheme::Bathe => run_bathe(system, tau, u0, z0, load, t_final, &options)?,
    };
    Ok(traj.final_state.u)
}

fn mesh_info(mesh: &PolygonalMesh, system: &DiscreteSystem, config: &StudyConfig) -> Result<MeshInfo> {
    let mass_condition = mass_condition_estimate(system).unwrap_or(f64::INFINITY);
    let singular_mass = !(mass_condition <= SINGULAR_MASS_CONDITION);
    let needs_cfl = config.scheme == Scheme::Newmark
        && NewmarkParams::new(config.beta, config.gamma, 1.0)?.conditionally_stable();
    let lambda_max = if config.report_lambda_max || needs_cfl {
        match estimate_max_eigenvalue(system)? {
            MaxEigenvalue::Bounded { lambda, .. } => Some(lambda),
            MaxEigenvalue::Unbounded { .. } => None,
        }
    } else {
        None
    };
    Ok(MeshInfo {
        h_max: mesh.h_max(),
        h_mean: mesh.h_mean(),
        cells: mesh.num_cells(),
        ndof: system.ndof(),
        mass_condition,
        singular_mass,
        lambda_max,
    })
}

/// Convergence study for the manufactured solution `sin(t^2) sin(pi x) sin(pi y)`
/// with zero initial data. Errors are measured on `u_I - u_h` at the final time.
pub fn run_test1(config: &StudyConfig) -> Result<Test1Report> {
    config.validate()?;
    let t_final = config.t_final;
    let mut records = Vec::new();
    let mut meshes = Vec::new();
    for &h in &config.h_list {
        let mesh = config.mesh.build(h, config.seed).map_err(|e| at(h, f64::NAN, e))?;
        let system = assemble(&mesh, config.k, config.mass_mode).map_err(|e| at(h, f64::NAN, e))?;
        let info = mesh_info(&mesh, &system, config).map_err(|e| at(h, f64::NAN, e))?;
        log::info!(
            "test1 k={} h_mean={:.4} cells={} ndof={} mass_condition={:.3e}",
            config.k,
            info.h_mean,
            info.cells,
            info.ndof,
            info.mass_condition
        );

        let shape_dofs = system.interpolate(spatial_shape);
        let u_exact = &shape_dofs * (t_final * t_final).sin();
        let (n1, n0) = system.discrete_norms(&u_exact)?;
        let load = SeparableLoad {
            shape: system.load_vector(spatial_shape),
            g: load_time_factor,
        };
        for &tau in &config.tau_list {
            let start = Instant::now();
            let uh = integrate_scheme(&system, config, tau, &load, info.lambda_max)
                .map_err(|e| at(h, tau, e))?;
            let (d1, d0) = system.discrete_norms(&(&u_exact - &uh))?;
            records.push(ErrorRecord {
                h_max: info.h_max,
                h_mean: info.h_mean,
                tau,
                e1: d1 / n1,
                e0: d0 / n0,
                seconds: if config.record_timing { start.elapsed().as_secs_f64() } else { 0.0 },
                ndof: info.ndof,
            });
        }
        meshes.push(info);
    }
    let rates = compute_rates(&records, config.k)?;
    let report = Test1Report { records, rates, meshes };
    if let Some(dir) = &config.out_dir {
        write_file(dir, "errors.csv", &errors_csv(&report.records))?;
        write_file(dir, "rates.csv", &rates_csv(&report.rates))?;
        write_file(dir, "meta.txt", &format_metadata(&test1_metadata(config, &report)))?;
    }
    Ok(report)
}

fn list(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x}")).collect::<Vec<_>>().join(" ")
}

fn test1_metadata(config: &StudyConfig, report: &Test1Report) -> Vec<(String, String)> {
    let mut m: Vec<(String, String)> = vec![
        ("test".into(), "test1".into()),
        ("exact_solution".into(), "sin(t^2) sin(pi x) sin(pi y)".into()),
        ("k".into(), config.k.to_string()),
        ("scheme".into(), config.scheme.as_str().into()),
        ("beta".into(), config.beta.to_string()),
        ("gamma".into(), config.gamma.to_string()),
        ("eps".into(), crate::time_integration::DEFAULT_EPS.to_string()),
        ("mass_mode".into(), config.mass_mode.as_str().into()),
        ("mesh_family".into(), config.mesh.as_str().into()),
        ("seed".into(), config.seed.to_string()),
        ("t_final".into(), config.t_final.to_string()),
        ("h_list".into(), list(&config.h_list)),
        ("tau_list".into(), list(&config.tau_list)),
        ("rate_h".into(), "h_max".into()),
        ("threads".into(), rayon::current_num_threads().to_string()),
    ];
    if let super::MeshFamily::Voronoi { lloyd_iters } = config.mesh {
        m.push(("lloyd_iters".into(), lloyd_iters.to_string()));
    }
    for (i, info) in report.meshes.iter().enumerate() {
        let p = format!("mesh{i}");
        m.push((format!("{p}.h_mean"), info.h_mean.to_string()));
        m.push((format!("{p}.h_max"), info.h_max.to_string()));
        m.push((format!("{p}.cells"), info.cells.to_string()));
        m.push((format!("{p}.ndof"), info.ndof.to_string()));
        m.push((format!("{p}.mass_condition"), format!("{:e}", info.mass_condition)));
        m.push((format!("{p}.singular_mass"), info.singular_mass.to_string()));
        m.push((
            format!("{p}.lambda_max"),
            info.lambda_max.map_or("not computed".into(), |l| l.to_string()),
        ));
    }
    m
}

/// Polynomial `sum c x^a y^b`.
#[derive(Debug, Clone, PartialEq)]
struct Polynomial(Vec<(f64, i32, i32)>);

impl Polynomial {
    /// A fixed polynomial of total degree `k` with every monomial present.
    fn patch(k: usize) -> Self {
        let all = [
            (1.0, 0, 0),
            (2.0, 1, 0),
            (-1.0, 0, 1),
            (1.0, 2, 0),
            (-0.5, 1, 1),
            (1.5, 0, 2),
            (0.7, 3, 0),
            (-1.0, 2, 1),
            (0.3, 1, 2),
            (-0.4, 0, 3),
        ];
        Polynomial(all.into_iter().filter(|&(_, a, b)| (a + b) as usize <= k).collect())
    }

    fn eval(&self, p: &Point) -> f64 {
        self.0.iter().map(|&(c, a, b)| c * p.x.powi(a) * p.y.powi(b)).sum()
    }

    fn neg_laplacian(&self, p: &Point) -> f64 {
        -self
            .0
            .iter()
            .map(|&(c, a, b)| {
                let dxx = if a >= 2 { c * (a * (a - 1)) as f64 * p.x.powi(a - 2) * p.y.powi(b) } else { 0.0 };
                let dyy = if b >= 2 { c * (b * (b - 1)) as f64 * p.x.powi(a) * p.y.powi(b - 2) } else { 0.0 };
                dxx + dyy
            })
            .sum::<f64>()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PatchResult {
    pub k: usize,
    pub e1: f64,
    pub e0: f64,
    pub steps: usize,
}

/// Time-independent solution `u = p(x)` of degree `k` with load `-Delta p`.
/// The boundary values of `p` are lifted: the free DOFs evolve under
/// `M w'' + K w = b - K_fb g` starting from the interpolant, and the error is
/// measured on all DOFs at `t_final`.
pub fn run_patch_test(mesh: &PolygonalMesh, k: usize, scheme: Scheme, tau: f64, t_final: f64) -> Result<PatchResult> {
    let system = assemble(mesh, k, crate::vem::MassMode::Stabilized)?;
    let p = Polynomial::patch(k);
    let exact = system.interpolate_full(|x| p.eval(x));
    let g = system.layout.restrict_boundary(&exact);
    let w0 = system.layout.restrict(&exact);
    let b = system.layout.restrict(&system.load_vector_full(|x| p.neg_laplacian(x))) - system.k_fb.mul_vec(&g);
    let load = ConstantLoad(b);
    let zero = DVector::zeros(system.ndof());
    let options = RunOptions::default();
    let traj = match scheme {
        Scheme::Newmark => run_newmark(&system, NewmarkParams::trapezoidal(tau), &w0, &zero, &load, t_final, &options)?,
        Scheme::Bathe => run_bathe(&system, tau, &w0, &zero, &load, t_final, &options)?,
    };
    let uh = system.layout.extend_with(&traj.final_state.u, &g);
    let (n1, n0) = system.discrete_norms_full(&exact)?;
    let (d1, d0) = system.discrete_norms_full(&(&exact - uh))?;
    if !(n1 > 0.0 && n0 > 0.0) {
        return Err(Error::InvalidArgument("patch polynomial has zero norm".into()));
    }
    Ok(PatchResult {
        k,
        e1: d1 / n1,
        e0: d0 / n0,
        steps: traj.steps,
    })
}
