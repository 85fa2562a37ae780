//! Polygonal meshes of the unit square.

mod io;
mod quality;
mod voronoi;

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::geometry::polygon::{self, Point};

pub use io::{read_mesh, write_mesh, parse_mesh, format_mesh};
pub use quality::{validate_mesh, MeshQualityReport};
pub use voronoi::{generate_voronoi_mesh, generate_voronoi_mesh_with_history, LloydHistory};

/// A conforming polygonal tiling of `[0, 1]^2`.
///
/// Cells are counterclockwise vertex loops. Values are immutable after
/// construction.
#[derive(Debug, Clone, PartialEq)]
pub struct PolygonalMesh {
    vertices: Vec<Point>,
    cells: Vec<Vec<usize>>,
    boundary: Vec<bool>,
}

/// Unique undirected edges of a mesh, numbered in first-seen order while
/// walking cells by index.
#[derive(Debug, Clone)]
pub struct EdgeTable {
    /// Endpoints `(a, b)` with `a < b`.
    pub endpoints: Vec<(usize, usize)>,
    /// Incident cells; the second entry is `None` for boundary edges.
    pub cells: Vec<(usize, Option<usize>)>,
    /// For every cell, the edge index of its `i`-th side (from vertex `i` to `i + 1`).
    pub cell_edges: Vec<Vec<usize>>,
}

impl EdgeTable {
    pub fn len(&self) -> usize {
        self.endpoints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.endpoints.is_empty()
    }

    pub fn is_boundary(&self, e: usize) -> bool {
        self.cells[e].1.is_none()
    }
}

impl PolygonalMesh {
    /// Build a mesh from raw parts. Boundary flags are taken as given; use
    /// [`PolygonalMesh::check_topology`] to validate.
    pub fn from_parts(vertices: Vec<Point>, cells: Vec<Vec<usize>>, boundary: Vec<bool>) -> Self {
        Self {
            vertices,
            cells,
            boundary,
        }
    }

    /// Build a mesh, flagging vertices that lie on the boundary of the unit square.
    pub fn new(vertices: Vec<Point>, cells: Vec<Vec<usize>>) -> Self {
        let boundary = vertices.iter().map(on_unit_square_boundary).collect();
        Self::from_parts(vertices, cells, boundary)
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn cells(&self) -> &[Vec<usize>] {
        &self.cells
    }

    pub fn boundary_flags(&self) -> &[bool] {
        &self.boundary
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_cells(&self) -> usize {
        self.cells.len()
    }

    pub fn cell_polygon(&self, c: usize) -> Vec<Point> {
        self.cells[c].iter().map(|&v| self.vertices[v]).collect()
    }

    pub fn cell_area(&self, c: usize) -> f64 {
        polygon::signed_area(&self.cell_polygon(c))
    }

    pub fn cell_diameter(&self, c: usize) -> f64 {
        polygon::diameter(&self.cell_polygon(c))
    }

    /// Maximum cell diameter.
    pub fn h_max(&self) -> f64 {
        (0..self.num_cells())
            .map(|c| self.cell_diameter(c))
            .fold(0.0, f64::max)
    }

    /// Mean cell diameter.
    pub fn h_mean(&self) -> f64 {
        let s: f64 = (0..self.num_cells()).map(|c| self.cell_diameter(c)).sum();
        s / self.num_cells() as f64
    }

    pub fn total_area(&self) -> f64 {
        (0..self.num_cells()).map(|c| self.cell_area(c)).sum()
    }

    pub fn edges(&self) -> EdgeTable {
        let mut index: HashMap<(usize, usize), usize> = HashMap::new();
        let mut endpoints = Vec::new();
        let mut cells: Vec<(usize, Option<usize>)> = Vec::new();
        let mut cell_edges = Vec::with_capacity(self.cells.len());
        for (c, loop_) in self.cells.iter().enumerate() {
            let n = loop_.len();
            let mut ce = Vec::with_capacity(n);
            for i in 0..n {
                let (a, b) = (loop_[i], loop_[(i + 1) % n]);
                let key = (a.min(b), a.max(b));
                let e = *index.entry(key).or_insert_with(|| {
                    endpoints.push(key);
                    cells.push((c, None));
                    endpoints.len() - 1
                });
                if cells[e].0 != c {
                    cells[e].1 = Some(c);
                }
                ce.push(e);
            }
            cell_edges.push(ce);
        }
        EdgeTable {
            endpoints,
            cells,
            cell_edges,
        }
    }

    /// Check the structural invariants: simple CCW cells, conforming edges,
    /// boundary edges on the square, area partition and boundary flags.
    pub fn check_topology(&self) -> Result<()> {
        let nv = self.vertices.len();
        let invalid = |reason: &str, cells: Vec<usize>| Error::InvalidMesh {
            reason: reason.to_string(),
            cells,
        };
        if self.boundary.len() != nv {
            return Err(invalid("boundary flag count differs from vertex count", vec![]));
        }
        let mut bad = Vec::new();
        for (c, loop_) in self.cells.iter().enumerate() {
            let mut seen = loop_.clone();
            seen.sort_unstable();
            seen.dedup();
            if loop_.len() < 3 || seen.len() != loop_.len() || loop_.iter().any(|&v| v >= nv) {
                bad.push(c);
            }
        }
        if !bad.is_empty() {
            return Err(invalid("degenerate cell loop", bad));
        }
        for c in 0..self.num_cells() {
            let p = self.cell_polygon(c);
            if polygon::signed_area(&p) <= 0.0 || !is_simple(&p) {
                bad.push(c);
            }
        }
        if !bad.is_empty() {
            return Err(invalid("cell is not a simple counterclockwise polygon", bad));
        }

        // Directed edge usage: every directed edge at most once, and a
        // boundary edge (no twin) must lie on the square.
        let mut directed: HashMap<(usize, usize), usize> = HashMap::new();
        for (c, loop_) in self.cells.iter().enumerate() {
            let n = loop_.len();
            for i in 0..n {
                if directed.insert((loop_[i], loop_[(i + 1) % n]), c).is_some() {
                    bad.push(c);
                }
            }
        }
        if !bad.is_empty() {
            bad.sort_unstable();
            bad.dedup();
            return Err(invalid("overlapping cells share an edge orientation", bad));
        }
        for (&(a, b), &c) in &directed {
            if !directed.contains_key(&(b, a)) {
                let (pa, pb) = (self.vertices[a], self.vertices[b]);
                let on_side = (pa.x == 0.0 && pb.x == 0.0)
                    || (pa.x == 1.0 && pb.x == 1.0)
                    || (pa.y == 0.0 && pb.y == 0.0)
                    || (pa.y == 1.0 && pb.y == 1.0);
                if !on_side {
                    bad.push(c);
                }
            }
        }
        if !bad.is_empty() {
            bad.sort_unstable();
            bad.dedup();
            return Err(invalid("dangling interior edge", bad));
        }

        let area = self.total_area();
        if (area - 1.0).abs() > 1e-9 {
            return Err(invalid(
                &format!("cell areas sum to {area}, expected 1 (overlap or gap)"),
                (0..self.num_cells()).collect(),
            ));
        }

        let mut used = vec![false; nv];
        for loop_ in &self.cells {
            for &v in loop_ {
                used[v] = true;
            }
        }
        if used.iter().any(|u| !u) {
            return Err(invalid("mesh has unused vertices", vec![]));
        }
        let edges = self.edges();
        for e in 0..edges.len() {
            if edges.is_boundary(e) {
                let (a, b) = edges.endpoints[e];
                if !self.boundary[a] || !self.boundary[b] {
                    return Err(invalid("boundary edge with unflagged endpoint", vec![edges.cells[e].0]));
                }
            }
        }
        Ok(())
    }
}

fn on_unit_square_boundary(p: &Point) -> bool {
    p.x == 0.0 || p.x == 1.0 || p.y == 0.0 || p.y == 1.0
}

fn segments_cross(a: &Point, b: &Point, c: &Point, d: &Point) -> bool {
    let orient = |p: &Point, q: &Point, r: &Point| (q.x - p.x) * (r.y - p.y) - (q.y - p.y) * (r.x - p.x);
    let (d1, d2) = (orient(a, b, c), orient(a, b, d));
    let (d3, d4) = (orient(c, d, a), orient(c, d, b));
    d1 * d2 < 0.0 && d3 * d4 < 0.0
}

fn is_simple(p: &[Point]) -> bool {
    let n = p.len();
    for i in 0..n {
        for j in i + 2..n {
            if i == 0 && j == n - 1 {
                continue;
            }
            if segments_cross(&p[i], &p[(i + 1) % n], &p[j], &p[(j + 1) % n]) {
                return false;
            }
        }
    }
    true
}

/// Uniform `n x n` grid of square cells.
pub fn generate_grid_mesh(n: usize) -> Result<PolygonalMesh> {
    if n == 0 {
        return Err(Error::InvalidArgument("grid size must be at least 1".into()));
    }
    let nf = n as f64;
    let mut vertices = Vec::with_capacity((n + 1) * (n + 1));
    for j in 0..=n {
        for i in 0..=n {
            vertices.push(Point::new(i as f64 / nf, j as f64 / nf));
        }
    }
    let id = |i: usize, j: usize| j * (n + 1) + i;
    let mut cells = Vec::with_capacity(n * n);
    for j in 0..n {
        for i in 0..n {
            cells.push(vec![id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)]);
        }
    }
    Ok(PolygonalMesh::new(vertices, cells))
}
