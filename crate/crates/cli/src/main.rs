//! `vemwave`: mesh generation and checks, convergence studies and matrix dumps.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use vemwave::harness::{run_test1, run_test2, MeshFamily, Scheme, StudyConfig};
use vemwave::mesh::{read_mesh, write_mesh};
use vemwave::spectral::generalized_eigendecomposition_with_cap;
use vemwave::{assemble, generate_grid_mesh, generate_voronoi_mesh, validate_mesh, DiscreteSystem, MassMode, PolygonalMesh};

#[derive(Parser)]
#[command(name = "vemwave", version, about = "Virtual element solver for the 2D wave equation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate or check meshes.
    #[command(subcommand)]
    Mesh(MeshCommand),
    /// Run a convergence or propagation study.
    #[command(subcommand)]
    Study(StudyCommand),
    /// Write assembled matrices, element matrices or eigenvalues.
    #[command(subcommand)]
    Dump(DumpCommand),
}

#[derive(Clone, Copy, ValueEnum)]
enum MeshKind {
    Grid,
    Voronoi,
}

#[derive(Subcommand)]
enum MeshCommand {
    /// Generate a mesh of the unit square.
    Gen {
        #[arg(long, value_enum)]
        kind: MeshKind,
        /// Cells per side for grids, number of cells for Voronoi meshes.
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Lloyd iterations (Voronoi only).
        #[arg(long, default_value_t = 50)]
        lloyd: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Check topology, star-shapedness and vertex separation.
    Check {
        #[arg(long = "in")]
        input: PathBuf,
        /// Minimum kernel-inradius to diameter ratio.
        #[arg(long, default_value_t = 0.05)]
        gamma_min: f64,
        /// Minimum vertex separation to diameter ratio.
        #[arg(long, default_value_t = 0.001)]
        c_min: f64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SchemeArg {
    Newmark,
    Bathe,
}

#[derive(Clone, Copy, ValueEnum)]
enum MassArg {
    Stab,
    Nostab,
}

impl From<MassArg> for MassMode {
    fn from(m: MassArg) -> Self {
        match m {
            MassArg::Stab => MassMode::Stabilized,
            MassArg::Nostab => MassMode::NonStabilized,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    Voronoi,
    Grid,
}

#[derive(Subcommand)]
enum StudyCommand {
    /// Convergence study for the manufactured solution sin(t^2) sin(pi x) sin(pi y).
    Test1(Test1Args),
    /// Point-source propagation, trapezoidal rule against the Bathe scheme.
    Test2(Test2Args),
}

#[derive(Args)]
struct Test1Args {
    #[arg(long)]
    k: usize,
    #[arg(long, value_enum, default_value = "newmark")]
    scheme: SchemeArg,
    #[arg(long, default_value_t = 0.25)]
    beta: f64,
    #[arg(long, default_value_t = 0.5)]
    gamma: f64,
    #[arg(long, value_enum, default_value = "stab")]
    mass: MassArg,
    /// Comma-separated mesh sizes; fractions such as 1/40 are accepted.
    #[arg(long, value_delimiter = ',', value_parser = parse_fraction, default_value = "1/5,1/10,1/20,1/40")]
    h_list: Vec<f64>,
    #[arg(long, value_delimiter = ',', value_parser = parse_fraction, default_value = "1/160")]
    tau_list: Vec<f64>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, value_enum, default_value = "voronoi")]
    mesh: FamilyArg,
    #[arg(long, default_value_t = 50)]
    lloyd: usize,
    #[arg(long, default_value_t = 1.0)]
    t_final: f64,
    /// Write 0 in the seconds column so repeated runs are byte-identical.
    #[arg(long)]
    no_timing: bool,
    /// Estimate the largest eigenvalue of every mesh for the metadata.
    #[arg(long)]
    lambda_max: bool,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct Test2Args {
    #[arg(long, value_delimiter = ',', value_parser = parse_fraction, default_value = "1/20,1/40,1/80")]
    tau_list: Vec<f64>,
    /// Grid size; 1/100 gives the finer setting.
    #[arg(long, value_parser = parse_fraction, default_value = "1/50")]
    h: f64,
    #[arg(long, default_value_t = 1)]
    k: usize,
    #[arg(long, value_enum, default_value = "stab")]
    mass: MassArg,
    #[arg(long, default_value_t = 100.0)]
    amplitude: f64,
    #[arg(long, default_value_t = 1.2)]
    t_final: f64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SystemArgs {
    /// Mesh file; a uniform grid is used when absent.
    #[arg(long, conflicts_with = "grid")]
    mesh: Option<PathBuf>,
    /// Cells per side of a uniform grid.
    #[arg(long, default_value_t = 4)]
    grid: usize,
    #[arg(long)]
    k: usize,
    #[arg(long, value_enum, default_value = "stab")]
    mass: MassArg,
}

impl SystemArgs {
    fn load_mesh(&self) -> vemwave::Result<PolygonalMesh> {
        match &self.mesh {
            Some(path) => read_mesh(path),
            None => generate_grid_mesh(self.grid),
        }
    }

    fn system(&self) -> vemwave::Result<(PolygonalMesh, DiscreteSystem)> {
        let mesh = self.load_mesh()?;
        let system = assemble(&mesh, self.k, self.mass.into())?;
        Ok((mesh, system))
    }
}

#[derive(Subcommand)]
enum DumpCommand {
    /// Stiffness and mass in coordinate text (`row col value`, 0-based, sorted).
    Matrices {
        #[command(flatten)]
        system: SystemArgs,
        /// Matrices before boundary elimination.
        #[arg(long)]
        full: bool,
        /// Also write the local stiffness and mass of every element.
        #[arg(long)]
        elements: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Generalized eigenvalues of the free-block pencil as `index,lambda,mu`.
    Eigenvalues {
        #[command(flatten)]
        system: SystemArgs,
        #[arg(long, default_value_t = vemwave::spectral::DEFAULT_DENSE_CAP)]
        cap: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

fn parse_fraction(s: &str) -> Result<f64, String> {
    let s = s.trim();
    let value = match s.split_once('/') {
        Some((a, b)) => {
            let a: f64 = a.trim().parse().map_err(|_| format!("bad number {a:?}"))?;
            let b: f64 = b.trim().parse().map_err(|_| format!("bad number {b:?}"))?;
            a / b
        }
        None => s.parse().map_err(|_| format!("bad number {s:?}"))?,
    };
    if value > 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(format!("{s:?} must be a positive number"))
    }
}

fn write_text(path: &Path, text: &str) -> vemwave::Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    std::fs::write(path, text)?;
    Ok(())
}

fn element_text(system: &DiscreteSystem, c: usize) -> String {
    let data = &system.elements()[c];
    let dofs = &system.layout.cell_dofs[c];
    let mut s = String::new();
    let _ = writeln!(s, "cell {c}");
    let _ = writeln!(
        s,
        "dofs {}",
        dofs.iter().map(|d| d.to_string()).collect::<Vec<_>>().join(" ")
    );
    let pack = &data.pack;
    let local_k = vemwave::vem::local_stiffness(pack, 1.0);
    let local_m = vemwave::vem::local_mass(pack, &data.element, system.mass_mode);
    for (name, m) in [("stiffness", local_k), ("mass", local_m)] {
        let _ = writeln!(s, "{name} {} {}", m.nrows(), m.ncols());
        for i in 0..m.nrows() {
            let row: Vec<String> = (0..m.ncols()).map(|j| format!("{:.17e}", m[(i, j)])).collect();
            let _ = writeln!(s, "{}", row.join(" "));
        }
    }
    s
}

fn run(cli: Cli) -> vemwave::Result<ExitCode> {
    match cli.command {
        Command::Mesh(MeshCommand::Gen {
            kind,
            n,
            seed,
            lloyd,
            out,
        }) => {
            let mesh = match kind {
                MeshKind::Grid => generate_grid_mesh(n)?,
                MeshKind::Voronoi => generate_voronoi_mesh(n, seed, lloyd)?,
            };
            write_mesh(&mesh, &out)?;
            println!(
                "wrote {} ({} vertices, {} cells, h_max {:.6}, h_mean {:.6})",
                out.display(),
                mesh.num_vertices(),
                mesh.num_cells(),
                mesh.h_max(),
                mesh.h_mean()
            );
        }
        Command::Mesh(MeshCommand::Check {
            input,
            gamma_min,
            c_min,
        }) => {
            let mesh = read_mesh(&input)?;
            let report = validate_mesh(&mesh, gamma_min, c_min)?;
            println!("{}", report.summary());
            if !report.passes() {
                return Ok(ExitCode::from(2));
            }
        }
        Command::Study(StudyCommand::Test1(a)) => {
            let mut config = StudyConfig::test1(a.k);
            config.scheme = match a.scheme {
                SchemeArg::Newmark => Scheme::Newmark,
                SchemeArg::Bathe => Scheme::Bathe,
            };
            config.beta = a.beta;
            config.gamma = a.gamma;
            config.mass_mode = a.mass.into();
            config.h_list = a.h_list;
            config.tau_list = a.tau_list;
            config.seed = a.seed;
            config.mesh = match a.mesh {
                FamilyArg::Voronoi => MeshFamily::Voronoi { lloyd_iters: a.lloyd },
                FamilyArg::Grid => MeshFamily::Grid,
            };
            config.t_final = a.t_final;
            config.record_timing = !a.no_timing;
            config.report_lambda_max = a.lambda_max;
            config.out_dir = Some(a.out.clone());
            let report = run_test1(&config)?;
            for r in &report.records {
                println!(
                    "h_max {:.5} h_mean {:.5} tau {:.6} E1 {:.6e} E0 {:.6e}",
                    r.h_max, r.h_mean, r.tau, r.e1, r.e0
                );
            }
            for r in &report.rates {
                let flag = if r.flagged { "  (off expected)" } else { "" };
                println!("tau {:.6} {} rate {:.3} expected {}{flag}", r.tau, r.norm, r.rate, r.expected);
            }
            println!("artifacts in {}", a.out.display());
        }
        Command::Study(StudyCommand::Test2(a)) => {
            let mut config = StudyConfig::test2();
            config.tau_list = a.tau_list;
            config.h_list = vec![a.h];
            config.k = a.k;
            config.mass_mode = a.mass.into();
            config.amplitude = a.amplitude;
            config.t_final = a.t_final;
            config.out_dir = Some(a.out.clone());
            let report = run_test2(&config)?;
            println!(
                "{} DOFs, source DOF {} at ({}, {})",
                report.ndof, report.source_dof, report.source_point.x, report.source_point.y
            );
            for r in &report.runs {
                println!(
                    "{:<8} tau {:.6} velocity total variation {:.6e} energy drift after pulse {:.2e}",
                    r.scheme.as_str(),
                    r.tau,
                    r.oscillation_index,
                    r.energy_drift_after_pulse
                );
            }
            println!("artifacts in {}", a.out.display());
        }
        Command::Dump(DumpCommand::Matrices {
            system,
            full,
            elements,
            out,
        }) => {
            let (_, sys) = system.system()?;
            let (k, m) = if full { (&sys.k_full, &sys.m_full) } else { (&sys.k, &sys.m) };
            write_text(&out.join("stiffness.txt"), &k.to_coordinate_text())?;
            write_text(&out.join("mass.txt"), &m.to_coordinate_text())?;
            if elements {
                for c in 0..sys.elements().len() {
                    write_text(&out.join(format!("element_{c}.txt")), &element_text(&sys, c))?;
                }
            }
            println!("wrote matrices of size {} to {}", k.nrows(), out.display());
        }
        Command::Dump(DumpCommand::Eigenvalues { system, cap, out }) => {
            let (_, sys) = system.system()?;
            let basis = generalized_eigendecomposition_with_cap(&sys, cap)?;
            write_text(&out, &basis.eigenvalue_csv())?;
            println!("wrote {} eigenvalues to {}", basis.len(), out.display());
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
