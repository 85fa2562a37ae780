//! Gauss rules on intervals, triangles and polygons.

use std::f64::consts::PI;

use super::polygon::{self, Point};
use crate::error::{Error, Result};

/// Legendre polynomial `P_n(x)` and its derivative.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    if n == 0 {
        return (1.0, 0.0);
    }
    let (mut p0, mut p1) = (1.0, x);
    for j in 2..=n {
        let jf = j as f64;
        let p2 = ((2.0 * jf - 1.0) * x * p1 - (jf - 1.0) * p0) / jf;
        p0 = p1;
        p1 = p2;
    }
    // P_n'(x) = n (x P_n - P_{n-1}) / (x^2 - 1)
    let dp = if (x * x - 1.0).abs() < 1e-300 {
        let nf = n as f64;
        x.signum().powi(n as i32 + 1) * nf * (nf + 1.0) / 2.0
    } else {
        n as f64 * (x * p1 - p0) / (x * x - 1.0)
    };
    (p1, dp)
}

/// `n`-point Gauss–Legendre rule on `[-1, 1]`, nodes ascending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre(n, x);
        nodes[n - 1 - i] = x;
        weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

/// `n`-point Gauss–Lobatto rule on `[-1, 1]` (endpoints included), nodes ascending.
///
/// Interior nodes are the roots of `P'_{n-1}`.
pub fn gauss_lobatto(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 2);
    let m = n - 1;
    let mf = m as f64;
    let mut nodes = vec![-1.0; n];
    nodes[m] = 1.0;
    for i in 1..m {
        // Chebyshev–Gauss–Lobatto initial guess, then Newton on P'_m using
        // (1 - x^2) P''_m = 2x P'_m - m(m+1) P_m.
        let mut x = -(PI * i as f64 / mf).cos();
        for _ in 0..100 {
            let (p, dp) = legendre(m, x);
            let d2p = (2.0 * x * dp - mf * (mf + 1.0) * p) / (1.0 - x * x);
            let dx = dp / d2p;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = x;
    }
    let weights = nodes
        .iter()
        .map(|&x| {
            let (p, _) = legendre(m, x);
            2.0 / (mf * (mf + 1.0) * p * p)
        })
        .collect();
    (nodes, weights)
}

/// The `k - 1` interior nodes of the `(k + 1)`-point Gauss–Lobatto rule mapped
/// onto the segment `a -> b`, ordered from `a` to `b`.
pub fn edge_gauss_lobatto(k: usize, a: &Point, b: &Point) -> Vec<Point> {
    assert!(k >= 1);
    if k == 1 {
        return Vec::new();
    }
    let (nodes, _) = gauss_lobatto(k + 1);
    nodes[1..k]
        .iter()
        .map(|&s| a + (b - a) * (0.5 * (1.0 + s)))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub points: Vec<Point>,
    pub weights: Vec<f64>,
    pub degree: usize,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(&Point) -> f64) -> f64 {
        self.points
            .iter()
            .zip(&self.weights)
            .map(|(p, w)| w * f(p))
            .sum()
    }
}

/// Collapsed (Duffy) tensor Gauss rule on the triangle `a, b, c`, exact for
/// polynomials of total degree `degree`. Weights are positive.
fn triangle_rule(a: &Point, b: &Point, c: &Point, degree: usize, out: &mut QuadratureRule) {
    let n = degree / 2 + 1;
    let (xi, wi) = gauss_legendre(n);
    let area2 = ((b - a).x * (c - a).y - (b - a).y * (c - a).x).abs();
    for (s, ws) in xi.iter().zip(&wi) {
        let s = 0.5 * (s + 1.0);
        for (t, wt) in xi.iter().zip(&wi) {
            let t = 0.5 * (t + 1.0);
            // x = a + s (b - a) + s t (c - b), Jacobian s * 2|T|
            let p = a + (b - a) * s + (c - b) * (s * t);
            out.points.push(p);
            out.weights.push(0.25 * ws * wt * s * area2);
        }
    }
}

/// Quadrature on a simple counterclockwise polygon by fan sub-triangulation.
///
/// Convex polygons fan from the centroid; non-convex ones from the center of
/// the largest disc in their kernel.
pub fn polygon_quadrature(poly: &[Point], degree: usize) -> Result<QuadratureRule> {
    let anchor = fan_anchor(poly)?;
    let mut rule = QuadratureRule {
        points: Vec::new(),
        weights: Vec::new(),
        degree,
    };
    let n = poly.len();
    for i in 0..n {
        triangle_rule(&anchor, &poly[i], &poly[(i + 1) % n], degree, &mut rule);
    }
    Ok(rule)
}

pub fn fan_anchor(poly: &[Point]) -> Result<Point> {
    if polygon::is_convex(poly) {
        Ok(polygon::centroid(poly))
    } else {
        polygon::kernel_chebyshev_center(poly)
            .map(|(c, _)| c)
            .ok_or(Error::EmptyKernel)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> Vec<Point> {
        vec![
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(1.0, 1.0),
            Point::new(0.0, 1.0),
        ]
    }

    #[test]
    fn legendre_rules_integrate_polynomials() {
        for n in 1..8 {
            let (x, w) = gauss_legendre(n);
            for p in 0..2 * n {
                let q: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(p as i32)).sum();
                let exact = if p % 2 == 1 { 0.0 } else { 2.0 / (p as f64 + 1.0) };
                assert!((q - exact).abs() < 1e-14, "n={n} p={p}");
            }
        }
    }

    #[test]
    fn lobatto_rules_integrate_polynomials() {
        for n in 2..7 {
            let (x, w) = gauss_lobatto(n);
            for p in 0..2 * n - 2 {
                let q: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(p as i32)).sum();
                let exact = if p % 2 == 1 { 0.0 } else { 2.0 / (p as f64 + 1.0) };
                assert!((q - exact).abs() < 1e-14, "n={n} p={p}");
            }
        }
    }

    #[test]
    fn lobatto_interior_nodes() {
        assert!(edge_gauss_lobatto(1, &Point::origin(), &Point::new(1.0, 0.0)).is_empty());
        let mid = edge_gauss_lobatto(2, &Point::origin(), &Point::new(1.0, 0.0));
        assert_eq!(mid.len(), 1);
        assert!((mid[0] - Point::new(0.5, 0.0)).norm() < 1e-15);
        let (x, _) = gauss_lobatto(4);
        let r = 1.0 / 5f64.sqrt();
        assert!((x[1] + r).abs() < 1e-15 && (x[2] - r).abs() < 1e-15);
    }

    #[test]
    fn square_x2y2() {
        let q = polygon_quadrature(&square(), 4).unwrap();
        let v = q.integrate(|p| p.x * p.x * p.y * p.y);
        assert!((v - 1.0 / 9.0).abs() < 1e-13);
    }

    #[test]
    fn right_triangle_first_moment() {
        let t = vec![Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(0.0, 1.0)];
        let q = polygon_quadrature(&t, 1).unwrap();
        assert!((q.integrate(|p| p.x) - 1.0 / 6.0).abs() < 1e-14);
    }

    #[test]
    fn pentagon_weights_sum_to_area() {
        let pent: Vec<Point> = (0..5)
            .map(|i| {
                let a = 2.0 * PI * i as f64 / 5.0;
                Point::new(a.cos(), a.sin())
            })
            .collect();
        let q = polygon_quadrature(&pent, 0).unwrap();
        let s: f64 = q.weights.iter().sum();
        assert!((s - polygon::signed_area(&pent)).abs() < 1e-13);
        assert!(q.weights.iter().all(|&w| w > 0.0));
    }
}
