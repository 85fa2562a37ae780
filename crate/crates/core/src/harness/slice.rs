use std::f64::consts::SQRT_2;

use nalgebra::DVector;

use crate::assembly::DiscreteSystem;
use crate::geometry::{polygon, Point};

/// Sample of the discrete solution along the diagonal `(0,0)-(1,1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlicePoint {
    /// Arc length from the origin.
    pub s: f64,
    pub cell: usize,
    pub u: f64,
    pub z: f64,
}

/// Parameter intervals `[t0, t1]` of `t -> (t, t)` inside a polygon.
fn diagonal_chords(poly: &[Point]) -> Vec<(f64, f64)> {
    let n = poly.len();
    let mut ts = vec![];
    for i in 0..n {
        let (a, b) = (poly[i], poly[(i + 1) % n]);
        let (dx, dy) = (b.x - a.x, b.y - a.y);
        let denom = dx - dy;
        if denom.abs() > 1e-14 * (dx.abs() + dy.abs()) {
            let mu = (a.y - a.x) / denom;
            if (-1e-12..=1.0 + 1e-12).contains(&mu) {
                ts.push(a.x + mu * dx);
            }
        } else if (a.x - a.y).abs() < 1e-14 {
            // side lies on the diagonal
            ts.push(a.x);
            ts.push(b.x);
        }
    }
    ts.retain(|t| (0.0..=1.0).contains(t));
    ts.sort_by(f64::total_cmp);
    ts.dedup_by(|a, b| (*a - *b).abs() < 1e-13);
    ts.windows(2)
        .filter(|w| w[1] - w[0] > 1e-12)
        .filter(|w| {
            let m = 0.5 * (w[0] + w[1]);
            polygon::contains(poly, &Point::new(m, m))
        })
        .map(|w| (w[0], w[1]))
        .collect()
}

/// Two samples per chord of the diagonal through each cell, evaluating the
/// energy projection of `u` and `z` on that cell. Sorted by arc length.
pub fn diagonal_slice(system: &DiscreteSystem, u_full: &DVector<f64>, z_full: &DVector<f64>) -> Vec<SlicePoint> {
    let mut out = Vec::new();
    for data in system.elements() {
        let el = &data.element;
        let chords = diagonal_chords(&el.polygon);
        if chords.is_empty() {
            continue;
        }
        let cu = system.energy_projection(el.cell, u_full);
        let cz = system.energy_projection(el.cell, z_full);
        for (t0, t1) in chords {
            for frac in [0.25, 0.75] {
                let t = t0 + frac * (t1 - t0);
                let x = Point::new(t, t);
                out.push(SlicePoint {
                    s: t * SQRT_2,
                    cell: el.cell,
                    u: el.eval_polynomial(&cu, &x),
                    z: el.eval_polynomial(&cz, &x),
                });
            }
        }
    }
    out.sort_by(|a, b| a.s.total_cmp(&b.s).then(a.cell.cmp(&b.cell)));
    out
}

/// Total variation of the velocity along the slice.
pub fn oscillation_index(points: &[SlicePoint]) -> f64 {
    points.windows(2).map(|w| (w[1].z - w[0].z).abs()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assembly::assemble;
    use crate::mesh::{generate_grid_mesh, generate_voronoi_mesh};
    use crate::vem::MassMode;

    #[test]
    fn square_chord() {
        let sq = [
            Point::new(0.0, 0.0),
            Point::new(0.5, 0.0),
            Point::new(0.5, 0.5),
            Point::new(0.0, 0.5),
        ];
        assert_eq!(diagonal_chords(&sq), vec![(0.0, 0.5)]);
        let off = [
            Point::new(0.5, 0.0),
            Point::new(1.0, 0.0),
            Point::new(1.0, 0.5),
            Point::new(0.5, 0.5),
        ];
        assert!(diagonal_chords(&off).is_empty());
    }

    #[test]
    fn chords_cover_the_diagonal() {
        for mesh in [generate_grid_mesh(7).unwrap(), generate_voronoi_mesh(60, 2, 10).unwrap()] {
            let total: f64 = (0..mesh.num_cells())
                .flat_map(|c| diagonal_chords(&mesh.cell_polygon(c)))
                .map(|(a, b)| b - a)
                .sum();
            assert!((total - 1.0).abs() < 1e-10, "{total}");
        }
    }

    #[test]
    fn linear_field_is_reproduced() {
        let mesh = generate_voronoi_mesh(40, 3, 10).unwrap();
        let sys = assemble(&mesh, 2, MassMode::Stabilized).unwrap();
        let u = sys.interpolate_full(|p| p.x * p.y);
        let z = sys.interpolate_full(|p| 1.0 + p.x);
        let pts = diagonal_slice(&sys, &u, &z);
        assert!(pts.len() >= 2 * 6);
        for p in &pts {
            let t = p.s / SQRT_2;
            assert!((p.u - t * t).abs() < 1e-12 && (p.z - 1.0 - t).abs() < 1e-12);
        }
        // monotone z has total variation equal to its range
        let range = pts.last().unwrap().z - pts[0].z;
        assert!((oscillation_index(&pts) - range).abs() < 1e-12);
    }
}
