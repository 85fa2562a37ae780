//! Acceptance suite: one PASS/FAIL line per criterion. Criteria that are not
//! met are reported, not hidden; the process exits non-zero only when a check
//! cannot run at all.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use vemwave::geometry::{polygon_quadrature, Point};
use vemwave::harness::{run_patch_test, run_test1, run_test2, RateRecord, Scheme, StudyConfig, Test1Report};
use vemwave::spectral::{generalized_eigendecomposition, ModalOptions};
use vemwave::time_integration::{
    bathe_amplification, estimate_max_eigenvalue, estimate_min_eigenvalue, newmark_amplification, run_bathe,
    run_newmark, spectral_radius, NewmarkParams, RunOptions, SeparableLoad,
};
use vemwave::vem::{build_projectors, local_mass, local_stiffness, VemElement};
use vemwave::{assemble, generate_grid_mesh, generate_voronoi_mesh, MassMode, Result};

struct Outcome {
    pass: bool,
    detail: String,
}

fn report(name: &str, elapsed: Duration, outcome: Result<Outcome>) -> bool {
    match outcome {
        Ok(o) => {
            let tag = if o.pass { "PASS" } else { "FAIL" };
            println!("{tag} {name} ({:.1}s): {}", elapsed.as_secs_f64(), o.detail);
            o.pass
        }
        Err(e) => {
            println!("FAIL {name} ({:.1}s): error: {e}", elapsed.as_secs_f64());
            false
        }
    }
}

fn patch_test() -> Result<Outcome> {
    let start = Instant::now();
    let mesh = generate_voronoi_mesh(25, 1, 50)?;
    let mut worst: f64 = 0.0;
    let mut parts = vec![];
    for k in 1..=3 {
        for scheme in [Scheme::Newmark, Scheme::Bathe] {
            let r = run_patch_test(&mesh, k, scheme, 0.1, 1.0)?;
            worst = worst.max(r.e1).max(r.e0);
            parts.push(format!("k={k} {}: E1={:.1e} E0={:.1e}", scheme.as_str(), r.e1, r.e0));
        }
    }
    let secs = start.elapsed().as_secs_f64();
    Ok(Outcome {
        pass: worst <= 1e-9 && secs < 5.0,
        detail: format!("max error {worst:.2e} (limit 1e-9), {secs:.2}s (limit 5s); {}", parts.join(", ")),
    })
}

fn reference_polygons() -> Vec<(&'static str, Vec<Point>)> {
    let pentagon = (0..5)
        .map(|i| {
            let a = 2.0 * PI * i as f64 / 5.0 + 0.1;
            Point::new(0.4 + 0.3 * a.cos(), 0.6 + 0.3 * a.sin())
        })
        .collect();
    vec![
        (
            "square",
            vec![Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(1.0, 1.0), Point::new(0.0, 1.0)],
        ),
        ("triangle", vec![Point::new(0.1, 0.2), Point::new(0.9, 0.3), Point::new(0.4, 0.8)]),
        ("pentagon", pentagon),
        (
            "nonconvex hexagon",
            vec![
                Point::new(0.0, 0.0),
                Point::new(1.0, 0.0),
                Point::new(1.0, 0.5),
                Point::new(0.5, 0.5),
                Point::new(0.5, 1.0),
                Point::new(0.0, 1.0),
            ],
        ),
    ]
}

fn projector_suite() -> Result<Outcome> {
    let start = Instant::now();
    let (mut proj, mut stiff, mut mass) = (0.0f64, 0.0f64, 0.0f64);
    for (_, poly) in reference_polygons() {
        for k in 1..=3 {
            let el = VemElement::new(0, poly.clone(), k)?;
            let pack = build_projectors(&el)?;
            let nk = el.n_monomials();
            let eye = DMatrix::<f64>::identity(nk, nk);
            proj = proj
                .max((&pack.pi_nabla_star * &pack.d - &eye).amax())
                .max((&pack.pi_zero_star * &pack.d - &eye).amax());

            // products of monomials integrated by an independent rule of degree 2k+2
            let fine = polygon_quadrature(&poly, 2 * k + 2)?;
            let kd = pack.d.transpose() * local_stiffness(&pack, 1.0) * &pack.d;
            let md = pack.d.transpose() * local_mass(&pack, &el, MassMode::Stabilized) * &pack.d;
            let grad = DMatrix::from_fn(nk, nk, |a, b| {
                fine.integrate(|x| {
                    let (_, g) = el.basis.eval(x);
                    g[a].dot(&g[b])
                })
            });
            let l2 = DMatrix::from_fn(nk, nk, |a, b| {
                fine.integrate(|x| {
                    let v = el.basis.values(x);
                    v[a] * v[b]
                })
            });
            stiff = stiff.max((kd - &grad).amax() / grad.amax());
            mass = mass.max((md - &l2).amax() / l2.amax());
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let worst = proj.max(stiff).max(mass);
    Ok(Outcome {
        pass: worst <= 1e-11 && secs < 5.0,
        detail: format!(
            "projector identity {proj:.1e}, stiffness consistency {stiff:.1e}, mass consistency {mass:.1e} (limit 1e-11), {secs:.2}s"
        ),
    })
}

/// Rates between the two finest meshes, the asymptotic regime.
fn finest_rates(report: &Test1Report) -> Vec<&RateRecord> {
    let n = report.rates.len();
    report.rates[n.saturating_sub(2)..].iter().collect()
}

fn all_rates(report: &Test1Report) -> String {
    let pick = |norm: &str| {
        report
            .rates
            .iter()
            .filter(|r| r.norm == norm)
            .map(|r| format!("{:.2}", r.rate))
            .collect::<Vec<_>>()
            .join("/")
    };
    format!("E1 {} E0 {}", pick("E1"), pick("E0"))
}

fn test1_config(k: usize, mass_mode: MassMode) -> StudyConfig {
    let mut c = StudyConfig::test1(k);
    c.mass_mode = mass_mode;
    c.record_timing = false;
    c
}

fn spatial_rates(studies: &[(usize, Test1Report)], secs: f64) -> Outcome {
    let mut pass = secs < 600.0;
    let mut parts = vec![];
    for (k, rep) in studies {
        for r in finest_rates(rep) {
            pass &= !r.flagged;
            parts.push(format!("k={k} {} {:.2} (expect {})", r.norm, r.rate, r.expected));
        }
        parts.push(format!("[k={k} all pairs {}]", all_rates(rep)));
    }
    Outcome {
        pass,
        detail: format!("{}; {secs:.0}s", parts.join(", ")),
    }
}

fn nonstabilized_mass(stab: &[(usize, Test1Report)], nostab: &[(usize, Test1Report)], secs: f64) -> Outcome {
    let mut pass = secs < 600.0;
    let mut parts = vec![];
    for ((k, s), (_, n)) in stab.iter().zip(nostab) {
        for (rs, rn) in finest_rates(s).into_iter().zip(finest_rates(n)) {
            let close = (rs.rate - rn.rate).abs() <= 0.3;
            pass &= !rn.flagged && close;
            parts.push(format!("k={k} {} {:.2} (stab {:.2})", rn.norm, rn.rate, rs.rate));
        }
        parts.push(format!("[k={k} all pairs {}]", all_rates(n)));
    }
    let (_, k2) = &nostab[1];
    let fine = k2.meshes.last().expect("meshes");
    pass &= fine.singular_mass;
    let conds: Vec<String> = k2.meshes.iter().map(|m| format!("{:.1e}", m.mass_condition)).collect();
    parts.push(format!(
        "k=2 singular flag on finest mesh: {} (mass condition by mesh {})",
        fine.singular_mass,
        conds.join(" ")
    ));
    Outcome {
        pass,
        detail: parts.join(", "),
    }
}

/// Smallest `(omega tau)^2` at which the Newmark amplification leaves the unit disk.
fn instability_onset(beta: f64) -> f64 {
    let unstable = |s: f64| spectral_radius(&newmark_amplification(beta, 0.5, s.sqrt())) > 1.0 + 1e-9;
    let (mut lo, mut hi) = (1e-3f64, 1e3f64);
    for _ in 0..200 {
        let mid = (lo * hi).sqrt();
        if unstable(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

fn cfl_law() -> Result<Outcome> {
    let mut pass = true;
    let mut parts = vec![];
    for beta in [0.0, 0.1, 0.2] {
        let onset = instability_onset(beta);
        let law = 4.0 / (1.0 - 4.0 * beta);
        let rel = (onset / law - 1.0).abs();
        pass &= rel <= 0.01;
        parts.push(format!("beta={beta}: onset {onset:.4} vs {law:.4}"));
    }
    let sys = assemble(&generate_grid_mesh(40)?, 1, MassMode::Stabilized)?;
    let power = estimate_max_eigenvalue(&sys)?
        .value()
        .ok_or(vemwave::Error::UnboundedSpectrum)?;
    let dense = *generalized_eigendecomposition(&sys)?.eigenvalues.as_slice().last().unwrap();
    let rel = (power / dense - 1.0).abs();
    pass &= rel <= 1e-4;
    parts.push(format!("40x40 grid lambda_max {power:.6} vs dense {dense:.6} (rel {rel:.1e})"));
    Ok(Outcome {
        pass,
        detail: parts.join(", "),
    })
}

fn integrator_orders() -> Result<Outcome> {
    let sys = assemble(&generate_grid_mesh(11)?, 1, MassMode::Stabilized)?;
    let basis = generalized_eigendecomposition(&sys)?;
    let u0 = sys.interpolate(|p| (PI * p.x).sin() * (PI * p.y).sin() + p.x * p.y * (1.0 - p.x) * (1.0 - p.y));
    let z0 = sys.interpolate(|p| (2.0 * PI * p.x).sin() * (PI * p.y).sin());
    let load = SeparableLoad {
        shape: sys.load_vector(|p| p.x + p.y),
        g: |t: f64| (3.0 * t).cos(),
    };
    let t_final = 1.0;
    let (u_ref, _) = basis.solution(
        &u0,
        &z0,
        &load,
        t_final,
        ModalOptions {
            tau_ref: 1e-4,
            points_per_period: 64,
        },
    );
    let taus = [1.0 / 80.0, 1.0 / 160.0, 1.0 / 320.0, 1.0 / 640.0];
    let opts = RunOptions::default();
    let mut pass = true;
    let mut parts = vec![format!("{} DOFs", sys.ndof())];
    for scheme in [Scheme::Newmark, Scheme::Bathe] {
        let mut errs = vec![];
        for &tau in &taus {
            let traj = match scheme {
                Scheme::Newmark => run_newmark(&sys, NewmarkParams::trapezoidal(tau), &u0, &z0, &load, t_final, &opts)?,
                Scheme::Bathe => run_bathe(&sys, tau, &u0, &z0, &load, t_final, &opts)?,
            };
            errs.push(sys.m.quadratic_form(&(&traj.final_state.u - &u_ref)).sqrt());
        }
        let rates: Vec<f64> = errs.windows(2).map(|w| (w[0] / w[1]).log2()).collect();
        pass &= rates.iter().all(|&r| r >= 1.9);
        let shown: Vec<String> = rates.iter().map(|r| format!("{r:.3}")).collect();
        parts.push(format!("{} rates {}", scheme.as_str(), shown.join("/")));
    }
    let rho_bathe = spectral_radius(&bathe_amplification(100.0));
    let rho_trap = spectral_radius(&newmark_amplification(0.25, 0.5, 100.0));
    pass &= rho_bathe < 0.1 && (rho_trap - 1.0).abs() <= 1e-12;
    parts.push(format!("radius at omega tau = 100: bathe {rho_bathe:.4}, trapezoidal 1{:+.1e}", rho_trap - 1.0));
    Ok(Outcome {
        pass,
        detail: parts.join(", "),
    })
}

fn spectrum_sanity() -> Result<Outcome> {
    let sys = assemble(&generate_grid_mesh(100)?, 1, MassMode::Stabilized)?;
    let lambda = estimate_min_eigenvalue(&sys, 1e-10, 1000)?;
    let exact = 2.0 * PI * PI;
    let rel = (lambda / exact - 1.0).abs();
    Ok(Outcome {
        pass: rel <= 0.02,
        detail: format!("lambda_min {lambda:.6} vs 2 pi^2 = {exact:.6} (rel {rel:.2e}, limit 2e-2)"),
    })
}

fn test2_property() -> Result<Outcome> {
    let start = Instant::now();
    let mut config = StudyConfig::test2();
    config.tau_list = vec![1.0 / 20.0];
    let rep = run_test2(&config)?;
    let tv = |s| rep.run(s, 1.0 / 20.0).expect("run").oscillation_index;
    let (trap, bathe) = (tv(Scheme::Newmark), tv(Scheme::Bathe));
    let secs = start.elapsed().as_secs_f64();
    Ok(Outcome {
        pass: bathe < trap && secs < 300.0,
        detail: format!("velocity total variation bathe {bathe:.4} vs trapezoidal {trap:.4}, {} DOFs, {secs:.1}s", rep.ndof),
    })
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed())
}

fn run_studies(mode: MassMode) -> Result<(Vec<(usize, Test1Report)>, f64)> {
    let start = Instant::now();
    let mut out = vec![];
    for k in [1, 2] {
        out.push((k, run_test1(&test1_config(k, mode))?));
    }
    Ok((out, start.elapsed().as_secs_f64()))
}

fn main() {
    // `cargo test` passes libtest flags; listing must not run the suite.
    if std::env::args().any(|a| a == "--list") {
        return;
    }
    let mut results = vec![];
    let mut errored = false;

    let (o, t) = timed(patch_test);
    results.push(report("patch test", t, o));
    let (o, t) = timed(projector_suite);
    results.push(report("projector and consistency suite", t, o));

    let (stab, t_stab) = timed(|| run_studies(MassMode::Stabilized));
    let (nostab, t_nostab) = timed(|| run_studies(MassMode::NonStabilized));
    match (&stab, &nostab) {
        (Ok((s, ss)), Ok((n, ns))) => {
            results.push(report("spatial rates", t_stab, Ok(spatial_rates(s, *ss))));
            results.push(report("non-stabilized mass", t_nostab, Ok(nonstabilized_mass(s, n, *ns))));
        }
        (s, n) => {
            errored = true;
            let err = |r: &Result<(Vec<(usize, Test1Report)>, f64)>| r.as_ref().err().map(|e| e.to_string());
            println!("FAIL spatial rates: error: {:?}", err(s));
            println!("FAIL non-stabilized mass: error: {:?}", err(n));
            results.extend([false, false]);
        }
    }

    let (o, t) = timed(cfl_law);
    results.push(report("CFL law", t, o));
    let (o, t) = timed(integrator_orders);
    results.push(report("integrator orders", t, o));
    let (o, t) = timed(spectrum_sanity);
    results.push(report("spectrum sanity", t, o));
    let (o, t) = timed(test2_property);
    results.push(report("point-source total variation", t, o));

    let passed = results.iter().filter(|&&p| p).count();
    println!("acceptance: {passed}/{} criteria pass", results.len());
    if errored {
        std::process::exit(1);
    }
}
