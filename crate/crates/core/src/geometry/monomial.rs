//! Scaled monomials `m_(a,b)(x) = ((x - x_E)/h_E)^a ((y - y_E)/h_E)^b`.
//!
//! Ordering is graded lexicographic: degree first, then decreasing power of x:
//! `1, x, y, x^2, xy, y^2, x^3, ...`.

use nalgebra::Vector2;

use super::Point;

/// Number of monomials of total degree at most `k` in two variables.
pub const fn dim_p(k: isize) -> usize {
    if k < 0 {
        0
    } else {
        let k = k as usize;
        (k + 1) * (k + 2) / 2
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScaledMonomialBasis {
    pub center: Point,
    pub diameter: f64,
    pub degree: usize,
    pub exponents: Vec<(usize, usize)>,
}

impl ScaledMonomialBasis {
    pub fn new(center: Point, diameter: f64, degree: usize) -> Self {
        let mut exponents = Vec::with_capacity(dim_p(degree as isize));
        for d in 0..=degree {
            for b in 0..=d {
                exponents.push((d - b, b));
            }
        }
        Self {
            center,
            diameter,
            degree,
            exponents,
        }
    }

    pub fn len(&self) -> usize {
        self.exponents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exponents.is_empty()
    }

    /// Position of `m_(a,b)` in the basis.
    pub fn index(a: usize, b: usize) -> usize {
        let d = a + b;
        d * (d + 1) / 2 + b
    }

    fn scaled(&self, x: &Point) -> (f64, f64) {
        (
            (x.x - self.center.x) / self.diameter,
            (x.y - self.center.y) / self.diameter,
        )
    }

    pub fn values(&self, x: &Point) -> Vec<f64> {
        let (sx, sy) = self.scaled(x);
        self.exponents
            .iter()
            .map(|&(a, b)| sx.powi(a as i32) * sy.powi(b as i32))
            .collect()
    }

    /// Values and gradients, the latter including the `1/h_E` chain-rule factor.
    pub fn eval(&self, x: &Point) -> (Vec<f64>, Vec<Vector2<f64>>) {
        let (sx, sy) = self.scaled(x);
        let h = self.diameter;
        let pw = |s: f64, e: usize| if e == 0 { 1.0 } else { s.powi(e as i32) };
        let mut values = Vec::with_capacity(self.len());
        let mut grads = Vec::with_capacity(self.len());
        for &(a, b) in &self.exponents {
            values.push(pw(sx, a) * pw(sy, b));
            let gx = if a == 0 {
                0.0
            } else {
                a as f64 * pw(sx, a - 1) * pw(sy, b) / h
            };
            let gy = if b == 0 {
                0.0
            } else {
                b as f64 * pw(sx, a) * pw(sy, b - 1) / h
            };
            grads.push(Vector2::new(gx, gy));
        }
        (values, grads)
    }

    /// Laplacian of `m_(a,b)` as a list of `(basis index, coefficient)` pairs.
    pub fn laplacian(&self, alpha: usize) -> Vec<(usize, f64)> {
        let (a, b) = self.exponents[alpha];
        let h2 = self.diameter * self.diameter;
        let mut out = Vec::new();
        if a >= 2 {
            out.push((Self::index(a - 2, b), (a * (a - 1)) as f64 / h2));
        }
        if b >= 2 {
            out.push((Self::index(a, b - 2), (b * (b - 1)) as f64 / h2));
        }
        out
    }
}
