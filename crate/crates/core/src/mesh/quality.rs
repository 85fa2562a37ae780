use super::PolygonalMesh;
use crate::error::Result;
use crate::geometry::polygon;

/// Per-cell shape-regularity measures.
///
/// `star_shape_ratio` is the radius of the largest disc inside the cell's
/// kernel over `h_E`; `min_vertex_separation_ratio` is the closest vertex pair
/// over `h_E`.
#[derive(Debug, Clone, PartialEq)]
pub struct MeshQualityReport {
    pub h_max: f64,
    pub h_mean: f64,
    pub cell_diameters: Vec<f64>,
    pub star_shape_ratio: Vec<f64>,
    pub min_vertex_separation_ratio: Vec<f64>,
    pub gamma_min: f64,
    pub c_min: f64,
    pub star_shaped_pass: bool,
    pub vertex_separation_pass: bool,
}

impl MeshQualityReport {
    pub fn passes(&self) -> bool {
        self.star_shaped_pass && self.vertex_separation_pass
    }

    pub fn worst_star_shape_ratio(&self) -> f64 {
        self.star_shape_ratio.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn worst_vertex_separation_ratio(&self) -> f64 {
        self.min_vertex_separation_ratio
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    /// Cells failing either threshold.
    pub fn failing_cells(&self) -> Vec<usize> {
        (0..self.cell_diameters.len())
            .filter(|&c| {
                self.star_shape_ratio[c] <= self.gamma_min
                    || self.min_vertex_separation_ratio[c] <= self.c_min
            })
            .collect()
    }

    pub fn summary(&self) -> String {
        format!(
            "cells={} h_max={:.6e} h_mean={:.6e} min_star_ratio={:.6} min_sep_ratio={:.6} \
             star_shaped(gamma>{})={} separation(c>{})={}",
            self.cell_diameters.len(),
            self.h_max,
            self.h_mean,
            self.worst_star_shape_ratio(),
            self.worst_vertex_separation_ratio(),
            self.gamma_min,
            self.star_shaped_pass,
            self.c_min,
            self.vertex_separation_pass,
        )
    }
}

/// Check topology and measure the star-shape and vertex-separation ratios of
/// every cell against `gamma_min` and `c_min`.
pub fn validate_mesh(mesh: &PolygonalMesh, gamma_min: f64, c_min: f64) -> Result<MeshQualityReport> {
    mesh.check_topology()?;
    let n = mesh.num_cells();
    let mut cell_diameters = Vec::with_capacity(n);
    let mut star = Vec::with_capacity(n);
    let mut sep = Vec::with_capacity(n);
    for c in 0..n {
        let p = mesh.cell_polygon(c);
        let h = polygon::diameter(&p);
        let r = polygon::kernel_chebyshev_center(&p).map_or(0.0, |(_, r)| r);
        cell_diameters.push(h);
        star.push(r / h);
        sep.push(polygon::min_vertex_separation(&p) / h);
    }
    let h_max = cell_diameters.iter().copied().fold(0.0, f64::max);
    let h_mean = cell_diameters.iter().sum::<f64>() / n as f64;
    let star_shaped_pass = star.iter().all(|&r| r > gamma_min);
    let vertex_separation_pass = sep.iter().all(|&r| r > c_min);
    Ok(MeshQualityReport {
        h_max,
        h_mean,
        cell_diameters,
        star_shape_ratio: star,
        min_vertex_separation_ratio: sep,
        gamma_min,
        c_min,
        star_shaped_pass,
        vertex_separation_pass,
    })
}
