use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::geometry::{polygon_quadrature, Point};

fn square() -> Vec<Point> {
    vec![
        Point::new(0.0, 0.0),
        Point::new(1.0, 0.0),
        Point::new(1.0, 1.0),
        Point::new(0.0, 1.0),
    ]
}

fn triangle() -> Vec<Point> {
    vec![Point::new(0.1, 0.2), Point::new(0.9, 0.3), Point::new(0.4, 0.8)]
}

fn regular(n: usize, r: f64, c: Point) -> Vec<Point> {
    (0..n)
        .map(|i| {
            let a = 2.0 * PI * i as f64 / n as f64 + 0.1;
            Point::new(c.x + r * a.cos(), c.y + r * a.sin())
        })
        .collect()
}

fn l_hexagon() -> Vec<Point> {
    vec![
        Point::new(0.0, 0.0),
        Point::new(1.0, 0.0),
        Point::new(1.0, 0.5),
        Point::new(0.5, 0.5),
        Point::new(0.5, 1.0),
        Point::new(0.0, 1.0),
    ]
}

fn reference_polygons() -> Vec<(&'static str, Vec<Point>)> {
    vec![
        ("square", square()),
        ("triangle", triangle()),
        ("pentagon", regular(5, 0.3, Point::new(0.4, 0.6))),
        ("nonconvex hexagon", l_hexagon()),
    ]
}

fn element(poly: &[Point], k: usize) -> (VemElement, ProjectorPack) {
    let el = VemElement::new(0, poly.to_vec(), k).unwrap();
    let pack = build_projectors(&el).unwrap();
    (el, pack)
}

fn unit(n: usize, i: usize) -> DVector<f64> {
    let mut e = DVector::zeros(n);
    e[i] = 1.0;
    e
}

/// Quadrature of degree 2k+2, built independently of the element's own rule.
fn fine_rule(poly: &[Point], k: usize) -> crate::geometry::QuadratureRule {
    polygon_quadrature(poly, 2 * k + 2).unwrap()
}

#[test]
fn projector_identity_on_polynomials() {
    for (name, poly) in reference_polygons() {
        for k in 1..=3 {
            let (el, pack) = element(&poly, k);
            let nk = el.n_monomials();
            for a in 0..nk {
                let dofs = pack.d.column(a).into_owned();
                let e = unit(nk, a);
                let en = (&pack.pi_nabla_star * &dofs - &e).amax();
                let e0 = (&pack.pi_zero_star * &dofs - &e).amax();
                assert!(en <= 1e-11, "{name} k={k} a={a} nabla err {en}");
                assert!(e0 <= 1e-11, "{name} k={k} a={a} zero err {e0}");
            }
        }
    }
}

#[test]
fn square_k2_mixed_monomial() {
    let (el, pack) = element(&square(), 2);
    let a = crate::geometry::ScaledMonomialBasis::index(1, 1);
    let dofs = el.dofs_of_polynomial(&unit(6, a));
    assert!((&pack.pi_nabla_star * &dofs - unit(6, a)).amax() <= 1e-12);
    assert!((&pack.pi_zero_star * &dofs - unit(6, a)).amax() <= 1e-12);
}

#[test]
fn constants_are_reproduced() {
    for (_, poly) in reference_polygons() {
        for k in 1..=3 {
            let (el, pack) = element(&poly, k);
            let ones = el.dofs_of(|_| 1.0);
            let s = &pack.pi_nabla_star * &ones;
            assert!((s[0] - 1.0).abs() < 1e-12);
            assert!(s.rows(1, s.len() - 1).amax() < 1e-12);
            // the constant-fixing functional returns the constant itself
            let p0 = (pack.b.row(0) * &ones)[0];
            assert!((p0 - 1.0).abs() < 1e-13);
        }
    }
}

#[test]
fn enhancement_constraint_on_pentagon() {
    let poly = regular(5, 0.3, Point::new(0.4, 0.6));
    let (el, pack) = element(&poly, 2);
    let fine = fine_rule(&poly, 2);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let v = DVector::from_fn(el.n_dofs(), |_, _| rng.random::<f64>() - 0.5);
    let s0 = &pack.pi_zero_star * &v;
    let sn = &pack.pi_nabla_star * &v;
    let poly_at = |c: &DVector<f64>, x: &Point| el.eval_polynomial(c, x);

    // moment against P_0 equals the D3 degree of freedom
    let m0 = fine.integrate(|x| poly_at(&s0, x));
    assert!((m0 / el.area - v[el.dofs.moment(0)]).abs() < 1e-12);

    // L2-orthogonal complement of P_0 in P_2: q_a = m_a - mean(m_a)
    for a in 1..6 {
        let mean = fine.integrate(|x| el.basis.values(x)[a]) / el.area;
        let lhs = fine.integrate(|x| {
            let q = el.basis.values(x)[a] - mean;
            (poly_at(&s0, x) - poly_at(&sn, x)) * q
        });
        assert!(lhs.abs() < 1e-12, "a={a} residual {lhs}");
    }
}

#[test]
fn stiffness_kernel_is_constants() {
    for (name, poly) in reference_polygons() {
        for k in 1..=3 {
            let (el, pack) = element(&poly, k);
            let kmat = local_stiffness(&pack, 1.0);
            let ones = el.dofs_of(|_| 1.0);
            assert!((&kmat * &ones).amax() < 1e-12, "{name} k={k}");
            assert_eq!(kmat, kmat.transpose());
        }
    }
}

#[test]
fn stiffness_k_consistency_against_quadrature() {
    for (name, poly) in reference_polygons() {
        for k in 1..=3 {
            let (el, pack) = element(&poly, k);
            let fine = fine_rule(&poly, k);
            let kmat = local_stiffness(&pack, 1.0);
            let nk = el.n_monomials();
            let scale = (0..nk)
                .map(|a| fine.integrate(|x| el.basis.eval(x).1[a].norm_squared()))
                .fold(0.0, f64::max);
            for a in 0..nk {
                for b in 0..nk {
                    let exact = fine.integrate(|x| {
                        let (_, g) = el.basis.eval(x);
                        g[a].dot(&g[b])
                    });
                    let got = (pack.d.column(a).transpose() * &kmat * pack.d.column(b))[0];
                    assert!(
                        (got - exact).abs() <= 1e-11 * scale,
                        "{name} k={k} ({a},{b}) {got} vs {exact}"
                    );
                }
            }
            // against an arbitrary virtual function: a_h(m_a, v) = a(m_a, v) = (B v)_a
            let mut rng = ChaCha8Rng::seed_from_u64(k as u64);
            let v = DVector::from_fn(el.n_dofs(), |_, _| rng.random::<f64>());
            for a in 1..nk {
                let got = (pack.d.column(a).transpose() * &kmat * &v)[0];
                let exact = (pack.b.row(a) * &v)[0];
                assert!((got - exact).abs() <= 1e-11 * scale.max(1.0) * v.amax());
            }
        }
    }
}

#[test]
fn mass_k_consistency_against_quadrature() {
    for (name, poly) in reference_polygons() {
        for k in 1..=3 {
            let (el, pack) = element(&poly, k);
            let fine = fine_rule(&poly, k);
            for mode in [MassMode::Stabilized, MassMode::NonStabilized] {
                let m = local_mass(&pack, &el, mode);
                assert_eq!(m, m.transpose());
                let nk = el.n_monomials();
                for a in 0..nk {
                    for b in 0..nk {
                        let exact = fine.integrate(|x| {
                            let v = el.basis.values(x);
                            v[a] * v[b]
                        });
                        let got = (pack.d.column(a).transpose() * &m * pack.d.column(b))[0];
                        assert!(
                            (got - exact).abs() <= 1e-11 * el.area,
                            "{name} k={k} {mode:?} ({a},{b}) {got} vs {exact}"
                        );
                    }
                }
                let ones = el.dofs_of(|_| 1.0);
                assert!(((ones.transpose() * &m * &ones)[0] - el.area).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn hexagon_stiffness_spectrum() {
    let hex = regular(6, 1.0, Point::origin());
    for k in 1..=3 {
        let (_, pack) = element(&hex, k);
        let eig = SymmetricEigen::new(local_stiffness(&pack, 1.0)).eigenvalues;
        let zero = eig.iter().filter(|l| l.abs() < 1e-10).count();
        assert_eq!(zero, 1, "k={k} eigenvalues {eig}");
        assert!(eig.iter().all(|&l| l > -1e-10));
    }
}

#[test]
fn stabilized_mass_is_positive_definite() {
    for (name, poly) in reference_polygons() {
        for k in 1..=3 {
            let (el, pack) = element(&poly, k);
            let eig = SymmetricEigen::new(local_mass(&pack, &el, MassMode::Stabilized)).eigenvalues;
            assert!(eig.min() > 0.0, "{name} k={k}");
        }
    }
}

#[test]
fn unstabilized_mass_is_rank_deficient() {
    let (el, pack) = element(&square(), 2);
    let m = local_mass(&pack, &el, MassMode::NonStabilized);
    let eig = SymmetricEigen::new(m.clone()).eigenvalues;
    let tol = 1e-12 * eig.amax();
    assert!(eig.min() > -tol);
    let rank = eig.iter().filter(|&&l| l > tol).count();
    assert!(rank <= 6, "rank {rank}");
    assert!(rank < el.n_dofs());
}

#[test]
fn stabilization_sandwich() {
    for (_, poly) in reference_polygons() {
        for k in 1..=3 {
            let (el, pack) = element(&poly, k);
            let k1 = local_stiffness(&pack, 1.0);
            let k2 = local_stiffness(&pack, 2.0);
            // restrict to the complement of the constants
            let ones = el.dofs_of(|_| 1.0).normalize();
            let n = el.n_dofs();
            let proj = DMatrix::identity(n, n) - &ones * ones.transpose();
            let q = SymmetricEigen::new(proj).eigenvectors;
            let basis: Vec<_> = (0..n)
                .filter(|&i| (q.column(i).dot(&ones)).abs() < 1e-8)
                .map(|i| q.column(i).into_owned())
                .collect();
            let z = DMatrix::from_columns(&basis);
            let a = z.transpose() * k1 * &z;
            let b = z.transpose() * k2 * &z;
            let l = b.cholesky().unwrap().l();
            let li = l.clone().try_inverse().unwrap();
            let c = &li * a * li.transpose();
            let eig = SymmetricEigen::new(0.5 * (&c + c.transpose())).eigenvalues;
            assert!(eig.min() >= 0.5 - 1e-10 && eig.max() <= 2.0 + 1e-10, "{eig}");
        }
    }
}

#[test]
fn load_vector() {
    for (_, poly) in reference_polygons() {
        for k in 1..=3 {
            let (el, pack) = element(&poly, k);
            let nq = el.quadrature.len();
            let ones = el.dofs_of(|_| 1.0);
            let b = local_load(&pack, &el, &vec![1.0; nq]);
            assert!((b.dot(&ones) - el.area).abs() < 1e-12);
            assert_eq!(local_load(&pack, &el, &vec![0.0; nq]).amax(), 0.0);

            // f = m_(1,0): b . D(p) = \int f p for every polynomial p
            let samples: Vec<f64> = el.quadrature.points.iter().map(|x| el.basis.values(x)[1]).collect();
            let b = local_load(&pack, &el, &samples);
            let fine = fine_rule(&poly, k);
            for a in 0..el.n_monomials() {
                let exact = fine.integrate(|x| {
                    let v = el.basis.values(x);
                    v[1] * v[a]
                });
                assert!((b.dot(&pack.d.column(a)) - exact).abs() < 1e-12 * el.area.max(1.0));
            }
        }
    }
}

#[test]
fn element_rule_exact_for_mass_products() {
    for (_, poly) in reference_polygons() {
        for k in 1..=3 {
            let (el, _) = element(&poly, k);
            let fine = fine_rule(&poly, k);
            for a in 0..el.n_monomials() {
                for b in 0..el.n_monomials() {
                    let f = |x: &Point| {
                        let v = el.basis.values(x);
                        v[a] * v[b]
                    };
                    let coarse = el.quadrature.integrate(f);
                    let reference = fine.integrate(f);
                    assert!((coarse - reference).abs() <= 1e-12 * reference.abs().max(el.area));
                }
            }
        }
    }
}
