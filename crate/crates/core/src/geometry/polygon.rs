//! Planar polygon primitives shared by the mesh and element code.
//!
//! Polygons are slices of vertices in counterclockwise order; the closing
//! edge from the last vertex back to the first is implicit.

use nalgebra::{Matrix3, Point2, Vector2, Vector3};

pub type Point = Point2<f64>;

fn cross(a: Vector2<f64>, b: Vector2<f64>) -> f64 {
    a.x * b.y - a.y * b.x
}

/// Shoelace signed area; positive for counterclockwise loops.
pub fn signed_area(poly: &[Point]) -> f64 {
    let n = poly.len();
    let mut acc = 0.0;
    for i in 0..n {
        let p = poly[i];
        let q = poly[(i + 1) % n];
        acc += p.x * q.y - q.x * p.y;
    }
    0.5 * acc
}

/// Area-weighted centroid.
pub fn centroid(poly: &[Point]) -> Point {
    let n = poly.len();
    // Shift to the first vertex to limit cancellation on small cells far from
    // the origin.
    let o = poly[0];
    let (mut a, mut cx, mut cy) = (0.0, 0.0, 0.0);
    for i in 0..n {
        let p = poly[i] - o;
        let q = poly[(i + 1) % n] - o;
        let w = p.x * q.y - q.x * p.y;
        a += w;
        cx += (p.x + q.x) * w;
        cy += (p.y + q.y) * w;
    }
    Point::new(o.x + cx / (3.0 * a), o.y + cy / (3.0 * a))
}

/// Largest distance between two vertices.
pub fn diameter(poly: &[Point]) -> f64 {
    let mut d: f64 = 0.0;
    for i in 0..poly.len() {
        for j in i + 1..poly.len() {
            d = d.max((poly[i] - poly[j]).norm());
        }
    }
    d
}

/// Smallest distance between two distinct vertices.
pub fn min_vertex_separation(poly: &[Point]) -> f64 {
    let mut d = f64::INFINITY;
    for i in 0..poly.len() {
        for j in i + 1..poly.len() {
            d = d.min((poly[i] - poly[j]).norm());
        }
    }
    d
}

pub fn perimeter(poly: &[Point]) -> f64 {
    let n = poly.len();
    (0..n).map(|i| (poly[(i + 1) % n] - poly[i]).norm()).sum()
}

/// True when every turn is a left turn (collinear vertices allowed).
pub fn is_convex(poly: &[Point]) -> bool {
    let n = poly.len();
    let scale = diameter(poly).powi(2);
    (0..n).all(|i| {
        let a = poly[i];
        let b = poly[(i + 1) % n];
        let c = poly[(i + 2) % n];
        cross(b - a, c - b) >= -1e-14 * scale
    })
}

/// Even-odd point-in-polygon test; points on the boundary may go either way.
pub fn contains(poly: &[Point], x: &Point) -> bool {
    let n = poly.len();
    let mut inside = false;
    let mut j = n - 1;
    for i in 0..n {
        let (pi, pj) = (poly[i], poly[j]);
        if (pi.y > x.y) != (pj.y > x.y) {
            let xc = pj.x + (x.y - pj.y) * (pi.x - pj.x) / (pi.y - pj.y);
            if x.x < xc {
                inside = !inside;
            }
        }
        j = i;
    }
    inside
}

/// Center and radius of the largest disc contained in the kernel of the
/// polygon, i.e. in the intersection of the inner half-planes of all edges.
///
/// Returns `None` when the kernel has empty interior. Solved as the
/// three-variable linear program `max r` subject to
/// `n_i . (c - p_i) >= r` by enumerating vertices of the feasible set.
pub fn kernel_chebyshev_center(poly: &[Point]) -> Option<(Point, f64)> {
    let n = poly.len();
    if n < 3 {
        return None;
    }
    // Inward unit normals and offsets: n_i . c - r >= n_i . p_i
    let mut normals = Vec::with_capacity(n);
    let mut offsets = Vec::with_capacity(n);
    for i in 0..n {
        let e = poly[(i + 1) % n] - poly[i];
        let len = e.norm();
        if len == 0.0 {
            continue;
        }
        let nrm = Vector2::new(-e.y, e.x) / len;
        offsets.push(nrm.dot(&poly[i].coords));
        normals.push(nrm);
    }
    let m = normals.len();
    let scale = diameter(poly);
    let tol = 1e-12 * scale;
    let mut best: Option<(Point, f64)> = None;
    for i in 0..m {
        for j in i + 1..m {
            for l in j + 1..m {
                let a = Matrix3::new(
                    normals[i].x, normals[i].y, -1.0,
                    normals[j].x, normals[j].y, -1.0,
                    normals[l].x, normals[l].y, -1.0,
                );
                if a.determinant().abs() < 1e-12 {
                    continue;
                }
                let rhs = Vector3::new(offsets[i], offsets[j], offsets[l]);
                let Some(sol) = a.lu().solve(&rhs) else {
                    continue;
                };
                let (c, r) = (Vector2::new(sol.x, sol.y), sol.z);
                if best.as_ref().is_some_and(|b| r <= b.1) {
                    continue;
                }
                let feasible = (0..m).all(|q| normals[q].dot(&c) - r >= offsets[q] - tol);
                if feasible {
                    best = Some((Point::from(c), r));
                }
            }
        }
    }
    best.filter(|b| b.1 > tol)
}

/// Clip a convex polygon against the half-plane `{x : (x - origin) . normal <= 0}`.
pub fn clip_half_plane(poly: &[Point], origin: &Point, normal: &Vector2<f64>) -> Vec<Point> {
    let n = poly.len();
    let mut out = Vec::with_capacity(n + 1);
    if n == 0 {
        return out;
    }
    let side: Vec<f64> = poly.iter().map(|p| (p - origin).dot(normal)).collect();
    for i in 0..n {
        let j = (i + 1) % n;
        let (p, q) = (poly[i], poly[j]);
        let (sp, sq) = (side[i], side[j]);
        if sp <= 0.0 {
            out.push(p);
        }
        if (sp < 0.0 && sq > 0.0) || (sp > 0.0 && sq < 0.0) {
            let t = sp / (sp - sq);
            out.push(p + (q - p) * t);
        }
    }
    out
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
    fn square_measures() {
        let s = square();
        assert_eq!(signed_area(&s), 1.0);
        assert_eq!(centroid(&s), Point::new(0.5, 0.5));
        assert!((diameter(&s) - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(perimeter(&s), 4.0);
        assert!(is_convex(&s));
        let (c, r) = kernel_chebyshev_center(&s).unwrap();
        assert!((r - 0.5).abs() < 1e-14);
        assert!((c - Point::new(0.5, 0.5)).norm() < 1e-14);
    }

    #[test]
    fn clockwise_has_negative_area() {
        let mut s = square();
        s.reverse();
        assert_eq!(signed_area(&s), -1.0);
    }

    #[test]
    fn clip_square_in_half() {
        let s = square();
        let out = clip_half_plane(&s, &Point::new(0.5, 0.0), &Vector2::new(1.0, 0.0));
        assert!((signed_area(&out) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn comb_without_kernel() {
        // Two tall teeth joined at the bottom: no point sees both tips.
        let comb = vec![
            Point::new(0.0, 0.0),
            Point::new(3.0, 0.0),
            Point::new(3.0, 3.0),
            Point::new(2.0, 3.0),
            Point::new(2.0, 0.2),
            Point::new(1.0, 0.2),
            Point::new(1.0, 3.0),
            Point::new(0.0, 3.0),
        ];
        assert!(signed_area(&comb) > 0.0);
        assert!(!is_convex(&comb));
        assert!(kernel_chebyshev_center(&comb).is_none());
    }

    #[test]
    fn point_in_polygon() {
        let s = square();
        assert!(contains(&s, &Point::new(0.3, 0.7)));
        assert!(!contains(&s, &Point::new(1.3, 0.7)));
    }
}
