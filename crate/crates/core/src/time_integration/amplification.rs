//! Closed-form one-step maps of the schemes applied to `u'' + w^2 u = 0`,
//! acting on `(u, tau z)`.

use nalgebra::Matrix2;

/// Newmark map for `Omega = w tau`.
pub fn newmark_amplification(beta: f64, gamma: f64, omega_tau: f64) -> Matrix2<f64> {
    let o2 = omega_tau * omega_tau;
    let d = 1.0 + beta * o2;
    let a11 = (1.0 - (0.5 - beta) * o2) / d;
    let a12 = 1.0 / d;
    Matrix2::new(
        a11,
        a12,
        -o2 * ((1.0 - gamma) + gamma * a11),
        1.0 - gamma * o2 * a12,
    )
}

/// Composite map: trapezoidal half step, then three-point backward difference.
pub fn bathe_amplification(omega_tau: f64) -> Matrix2<f64> {
    let o2 = omega_tau * omega_tau;
    let column = |u: f64, v: f64| {
        let uh = (u * (1.0 - o2 / 16.0) + 0.5 * v) / (1.0 + o2 / 16.0);
        let vh = 4.0 * (uh - u) - v;
        let u1 = -(3.0 * (u - 4.0 * uh) + (v - 4.0 * vh)) / (9.0 + o2);
        let v1 = u - 4.0 * uh + 3.0 * u1;
        (u1, v1)
    };
    let (a11, a21) = column(1.0, 0.0);
    let (a12, a22) = column(0.0, 1.0);
    Matrix2::new(a11, a12, a21, a22)
}

/// Largest eigenvalue modulus of a real 2x2 matrix.
pub fn spectral_radius(a: &Matrix2<f64>) -> f64 {
    let half_trace = 0.5 * (a[(0, 0)] + a[(1, 1)]);
    let det = a.determinant();
    let disc = half_trace * half_trace - det;
    if disc < 0.0 {
        det.sqrt()
    } else {
        let s = disc.sqrt();
        (half_trace + s).abs().max((half_trace - s).abs())
    }
}
