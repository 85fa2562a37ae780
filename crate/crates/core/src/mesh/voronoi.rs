//! Lloyd-relaxed Voronoi tessellations of the unit square.

use nalgebra::Vector2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::PolygonalMesh;
use crate::error::{Error, Result};
use crate::geometry::polygon::{self, Point};

const MAX_ATTEMPTS: usize = 8;

/// Per-iteration record of a Lloyd relaxation.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LloydHistory {
    /// Largest generator displacement of each iteration.
    pub max_displacement: Vec<f64>,
    /// Quantization energy `sum_i \int_{V_i} |x - g_i|^2` before each iteration.
    pub energy: Vec<f64>,
}

/// Second moment of a polygon about `g`.
fn polar_moment(poly: &[Point], g: &Point) -> f64 {
    let n = poly.len();
    let mut acc = 0.0;
    for i in 0..n {
        let a = poly[i] - g;
        let b = poly[(i + 1) % n] - g;
        let cross = a.x * b.y - b.x * a.y;
        acc += cross * (a.x * a.x + a.x * b.x + b.x * b.x + a.y * a.y + a.y * b.y + b.y * b.y);
    }
    acc / 12.0
}

/// Clipped Voronoi mesh of `n_cells` random generators relaxed by
/// `lloyd_iters` Lloyd iterations. Deterministic in `(n_cells, seed, lloyd_iters)`.
pub fn generate_voronoi_mesh(n_cells: usize, seed: u64, lloyd_iters: usize) -> Result<PolygonalMesh> {
    generate_voronoi_mesh_with_history(n_cells, seed, lloyd_iters).map(|(m, _)| m)
}

pub fn generate_voronoi_mesh_with_history(
    n_cells: usize,
    seed: u64,
    lloyd_iters: usize,
) -> Result<(PolygonalMesh, LloydHistory)> {
    if n_cells == 0 {
        return Err(Error::InvalidArgument("n_cells must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points: Vec<Point> = (0..n_cells)
        .map(|_| Point::new(rng.random::<f64>(), rng.random::<f64>()))
        .collect();
    let spacing = (1.0 / n_cells as f64).sqrt();
    let mut last_reason = String::new();
    for attempt in 0..MAX_ATTEMPTS {
        if attempt > 0 {
            let amp = 1e-6 * spacing * attempt as f64;
            for p in &mut points {
                let dx = amp * (rng.random::<f64>() - 0.5);
                let dy = amp * (rng.random::<f64>() - 0.5);
                p.x = (p.x + dx).clamp(0.0, 1.0);
                p.y = (p.y + dy).clamp(0.0, 1.0);
            }
        }
        if let Some((i, j)) = coincident_pair(&points, 1e-10 * spacing) {
            last_reason = format!("generators {i} and {j} coincide");
            continue;
        }
        let mut gens = points.clone();
        let mut history = LloydHistory::default();
        for _ in 0..lloyd_iters {
            let cells = voronoi_cells(&gens);
            let mut step: f64 = 0.0;
            let mut energy = 0.0;
            for (g, cell) in gens.iter_mut().zip(&cells) {
                energy += polar_moment(cell, g);
                let c = polygon::centroid(cell);
                step = step.max((c - *g).norm());
                *g = c;
            }
            history.max_displacement.push(step);
            history.energy.push(energy);
        }
        let cells = voronoi_cells(&gens);
        match stitch(&cells, 1e-3 * spacing).and_then(|m| m.check_topology().map(|_| m)) {
            Ok(mesh) => return Ok((mesh, history)),
            Err(e) => last_reason = e.to_string(),
        }
    }
    Err(Error::MeshGeneration {
        attempts: MAX_ATTEMPTS,
        reason: last_reason,
    })
}

fn coincident_pair(points: &[Point], tol: f64) -> Option<(usize, usize)> {
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| points[a].x.total_cmp(&points[b].x).then(a.cmp(&b)));
    for (k, &i) in order.iter().enumerate() {
        for &j in &order[k + 1..] {
            if points[j].x - points[i].x > tol {
                break;
            }
            if (points[j] - points[i]).norm() <= tol {
                return Some((i.min(j), i.max(j)));
            }
        }
    }
    None
}

/// Uniform bucket grid over the unit square for neighbour search.
struct Buckets {
    size: usize,
    width: f64,
    items: Vec<Vec<usize>>,
}

impl Buckets {
    fn new(points: &[Point]) -> Self {
        let size = ((points.len() as f64).sqrt().ceil() as usize).max(1);
        let mut items = vec![Vec::new(); size * size];
        let width = 1.0 / size as f64;
        let b = Self { size, width, items: Vec::new() };
        for (i, p) in points.iter().enumerate() {
            let (bx, by) = b.locate(p);
            items[by * size + bx].push(i);
        }
        Self { items, ..b }
    }

    fn locate(&self, p: &Point) -> (usize, usize) {
        let f = |v: f64| ((v / self.width) as usize).min(self.size - 1);
        (f(p.x), f(p.y))
    }
}

fn unit_square() -> Vec<Point> {
    vec![
        Point::new(0.0, 0.0),
        Point::new(1.0, 0.0),
        Point::new(1.0, 1.0),
        Point::new(0.0, 1.0),
    ]
}

/// Voronoi cells of `points` clipped to the unit square, in generator order.
fn voronoi_cells(points: &[Point]) -> Vec<Vec<Point>> {
    let buckets = Buckets::new(points);
    let s = buckets.size as isize;
    let mut out = Vec::with_capacity(points.len());
    let mut ring = Vec::new();
    for (i, p) in points.iter().enumerate() {
        let mut cell = unit_square();
        let (bx, by) = buckets.locate(p);
        let (bx, by) = (bx as isize, by as isize);
        for r in 0..s {
            ring.clear();
            for j in by - r..=by + r {
                for k in bx - r..=bx + r {
                    let on_ring = (j - by).abs() == r || (k - bx).abs() == r;
                    if !on_ring || j < 0 || k < 0 || j >= s || k >= s {
                        continue;
                    }
                    ring.extend(
                        buckets.items[(j * s + k) as usize]
                            .iter()
                            .copied()
                            .filter(|&q| q != i),
                    );
                }
            }
            ring.sort_by(|&a, &b| {
                let da = (points[a] - p).norm_squared();
                let db = (points[b] - p).norm_squared();
                da.total_cmp(&db).then(a.cmp(&b))
            });
            for &q in &ring {
                let n: Vector2<f64> = points[q] - p;
                let mid = p + n * 0.5;
                cell = polygon::clip_half_plane(&cell, &mid, &n);
            }
            // Anything in ring r + 1 or beyond is at least r bucket widths
            // away; it cannot cut the cell once that exceeds twice its radius.
            let radius = cell.iter().map(|v| (v - p).norm()).fold(0.0, f64::max);
            if r as f64 * buckets.width > 2.0 * radius {
                break;
            }
        }
        out.push(cell);
    }
    out
}

/// Merge per-cell vertex lists into a shared vertex array, collapsing
/// vertices closer than `tol`.
fn stitch(cells: &[Vec<Point>], tol: f64) -> Result<PolygonalMesh> {
    use std::collections::HashMap;
    let key = |p: &Point| ((p.x / tol).floor() as i64, (p.y / tol).floor() as i64);
    let mut grid: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
    let mut vertices: Vec<Point> = Vec::new();
    let mut loops = Vec::with_capacity(cells.len());
    for cell in cells {
        let mut loop_: Vec<usize> = Vec::with_capacity(cell.len());
        for p in cell {
            let (kx, ky) = key(p);
            let mut found = None;
            'search: for dx in -1..=1 {
                for dy in -1..=1 {
                    if let Some(list) = grid.get(&(kx + dx, ky + dy)) {
                        for &v in list {
                            if (vertices[v] - p).norm() <= tol {
                                found = Some(v);
                                break 'search;
                            }
                        }
                    }
                }
            }
            let v = match found {
                Some(v) => {
                    // Boundary coordinates win so the square stays exact.
                    for i in 0..2 {
                        if p[i] == 0.0 || p[i] == 1.0 {
                            vertices[v][i] = p[i];
                        }
                    }
                    v
                }
                None => {
                    vertices.push(*p);
                    grid.entry((kx, ky)).or_default().push(vertices.len() - 1);
                    vertices.len() - 1
                }
            };
            if loop_.last() != Some(&v) {
                loop_.push(v);
            }
        }
        while loop_.len() > 1 && loop_.first() == loop_.last() {
            loop_.pop();
        }
        loops.push(loop_);
    }
    let bad: Vec<usize> = loops
        .iter()
        .enumerate()
        .filter(|(_, l)| l.len() < 3)
        .map(|(c, _)| c)
        .collect();
    if !bad.is_empty() {
        return Err(Error::InvalidMesh {
            reason: "cell collapsed while merging vertices".into(),
            cells: bad,
        });
    }
    Ok(PolygonalMesh::new(vertices, loops))
}
