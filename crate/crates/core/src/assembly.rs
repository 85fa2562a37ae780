//! Global degrees of freedom, assembly of the stiffness and mass matrices,
//! interpolation and discrete norms.

use log::warn;
use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{dim_p, edge_gauss_lobatto, polygon_quadrature, Point};
use crate::linalg::{CscMatrix, TripletBuilder};
use crate::mesh::PolygonalMesh;
use crate::vem::{build_projectors, local_mass, local_stiffness, DofKind, MassMode, ProjectorPack, VemElement};

/// Tolerance above which interpolated boundary values trigger a warning.
const BOUNDARY_TOL: f64 = 1e-10;

/// Global numbering: all vertices, then `k - 1` nodes per edge ordered from
/// the lower to the higher vertex index, then `k(k-1)/2` moments per cell.
#[derive(Debug, Clone, PartialEq)]
pub struct DofLayout {
    pub degree: usize,
    /// Global index of every local DOF, per cell.
    pub cell_dofs: Vec<Vec<usize>>,
    /// Whether a global DOF lies on the boundary of the square.
    pub boundary: Vec<bool>,
    /// Evaluation point of point-value DOFs; `None` for moments.
    pub points: Vec<Option<Point>>,
    free_index: Vec<Option<usize>>,
    free_dofs: Vec<usize>,
    boundary_index: Vec<Option<usize>>,
    boundary_dofs: Vec<usize>,
}

impl DofLayout {
    /// Number the DOFs of `mesh` for degree `k`.
    pub fn new(mesh: &PolygonalMesh, k: usize) -> Result<Self> {
        if !(1..=3).contains(&k) {
            return Err(Error::InvalidArgument(format!("degree k = {k} is not in 1..=3")));
        }
        let edges = mesh.edges();
        let nv = mesh.num_vertices();
        let ne = edges.len();
        let per_edge = k - 1;
        let per_cell = dim_p(k as isize - 2);
        let n_total = nv + ne * per_edge + mesh.num_cells() * per_cell;

        let mut boundary = vec![false; n_total];
        let mut points = vec![None; n_total];
        for (v, p) in mesh.vertices().iter().enumerate() {
            boundary[v] = mesh.boundary_flags()[v];
            points[v] = Some(*p);
        }
        for (e, &(a, b)) in edges.endpoints.iter().enumerate() {
            let nodes = edge_gauss_lobatto(k, &mesh.vertices()[a], &mesh.vertices()[b]);
            for (j, p) in nodes.into_iter().enumerate() {
                let g = nv + e * per_edge + j;
                boundary[g] = edges.is_boundary(e);
                points[g] = Some(p);
            }
        }

        let moment_base = nv + ne * per_edge;
        let mut cell_dofs = Vec::with_capacity(mesh.num_cells());
        for (c, cell) in mesh.cells().iter().enumerate() {
            let n = cell.len();
            let mut map = Vec::with_capacity(n * k + per_cell);
            map.extend_from_slice(cell);
            for i in 0..n {
                let e = edges.cell_edges[c][i];
                let forward = edges.endpoints[e].0 == cell[i];
                for j in 0..per_edge {
                    let jj = if forward { j } else { per_edge - 1 - j };
                    map.push(nv + e * per_edge + jj);
                }
            }
            map.extend((0..per_cell).map(|a| moment_base + c * per_cell + a));
            cell_dofs.push(map);
        }
        Ok(Self::with_parts(k, cell_dofs, boundary, points))
    }

    /// `n` unconstrained DOFs with no geometry.
    pub fn all_free(n: usize) -> Self {
        Self::with_parts(1, Vec::new(), vec![false; n], vec![None; n])
    }

    fn with_parts(degree: usize, cell_dofs: Vec<Vec<usize>>, boundary: Vec<bool>, points: Vec<Option<Point>>) -> Self {
        let n = boundary.len();
        let mut free_index = vec![None; n];
        let mut boundary_index = vec![None; n];
        let mut free_dofs = Vec::new();
        let mut boundary_dofs = Vec::new();
        for g in 0..n {
            if boundary[g] {
                boundary_index[g] = Some(boundary_dofs.len());
                boundary_dofs.push(g);
            } else {
                free_index[g] = Some(free_dofs.len());
                free_dofs.push(g);
            }
        }
        Self {
            degree,
            cell_dofs,
            boundary,
            points,
            free_index,
            free_dofs,
            boundary_index,
            boundary_dofs,
        }
    }

    pub fn n_total(&self) -> usize {
        self.boundary.len()
    }

    pub fn n_free(&self) -> usize {
        self.free_dofs.len()
    }

    pub fn n_boundary(&self) -> usize {
        self.boundary_dofs.len()
    }

    /// Position of global DOF `g` among the free DOFs.
    pub fn free_index(&self, g: usize) -> Option<usize> {
        self.free_index[g]
    }

    /// Global index of every free DOF, ascending.
    pub fn free_dofs(&self) -> &[usize] {
        &self.free_dofs
    }

    pub fn boundary_dofs(&self) -> &[usize] {
        &self.boundary_dofs
    }

    pub fn restrict(&self, full: &DVector<f64>) -> DVector<f64> {
        DVector::from_iterator(self.n_free(), self.free_dofs.iter().map(|&g| full[g]))
    }

    pub fn restrict_boundary(&self, full: &DVector<f64>) -> DVector<f64> {
        DVector::from_iterator(self.n_boundary(), self.boundary_dofs.iter().map(|&g| full[g]))
    }

    /// Full vector with zero boundary entries.
    pub fn extend(&self, free: &DVector<f64>) -> DVector<f64> {
        let mut full = DVector::zeros(self.n_total());
        for (i, &g) in self.free_dofs.iter().enumerate() {
            full[g] = free[i];
        }
        full
    }

    /// Full vector with the given boundary entries.
    pub fn extend_with(&self, free: &DVector<f64>, boundary: &DVector<f64>) -> DVector<f64> {
        let mut full = self.extend(free);
        for (i, &g) in self.boundary_dofs.iter().enumerate() {
            full[g] = boundary[i];
        }
        full
    }

    /// Free point-value DOF closest to `p`; the lowest index wins ties.
    pub fn nearest_free_dof(&self, p: &Point) -> Option<usize> {
        let mut best: Option<(f64, usize)> = None;
        for (i, &g) in self.free_dofs.iter().enumerate() {
            if let Some(q) = self.points[g] {
                let d = (q - p).norm_squared();
                // distances equal up to round-off count as ties
                if best.is_none_or(|(bd, _)| d < bd * (1.0 - 1e-9)) {
                    best = Some((d, i));
                }
            }
        }
        best.map(|(_, i)| i)
    }
}

/// Element data kept after assembly for loads, interpolation and evaluation.
#[derive(Debug, Clone)]
pub struct ElementData {
    pub element: VemElement,
    pub pack: ProjectorPack,
    /// Maps samples of `f` at the quadrature nodes to the local load vector.
    load_operator: DMatrix<f64>,
}

impl ElementData {
    fn new(element: VemElement, pack: ProjectorPack) -> Self {
        let weighted = DMatrix::from_fn(element.n_monomials(), element.quadrature.len(), |a, q| {
            element.basis_at_nodes[(q, a)] * element.quadrature.weights[q]
        });
        let load_operator = pack.pi_zero_star.tr_mul(&weighted);
        Self {
            element,
            pack,
            load_operator,
        }
    }
}

/// Global discrete problem with homogeneous Dirichlet conditions eliminated.
#[derive(Debug, Clone)]
pub struct DiscreteSystem {
    pub degree: usize,
    pub mass_mode: MassMode,
    pub layout: DofLayout,
    /// Stiffness on the free DOFs.
    pub k: CscMatrix,
    /// Mass on the free DOFs.
    pub m: CscMatrix,
    /// Stiffness before elimination.
    pub k_full: CscMatrix,
    /// Mass before elimination.
    pub m_full: CscMatrix,
    /// Free-by-boundary stiffness block, used to lift boundary data.
    pub k_fb: CscMatrix,
    elements: Vec<ElementData>,
}

/// Assemble stiffness and mass for degree `k` on a validated mesh.
pub fn assemble(mesh: &PolygonalMesh, k: usize, mass_mode: MassMode) -> Result<DiscreteSystem> {
    DiscreteSystem::assemble(mesh, k, mass_mode)
}

/// Interpolant of `u` on the free DOFs. Warns when `u` does not vanish on the boundary.
pub fn interpolate(system: &DiscreteSystem, u: impl Fn(&Point) -> f64 + Sync) -> DVector<f64> {
    system.interpolate(u)
}

/// `(sqrt(v^T K v), sqrt(v^T M v))` for a free DOF vector.
pub fn discrete_norms(system: &DiscreteSystem, v: &DVector<f64>) -> Result<(f64, f64)> {
    system.discrete_norms(v)
}

fn checked_form(a: &CscMatrix, v: &DVector<f64>) -> Result<f64> {
    let q = a.quadratic_form(v);
    let scale = 1.0 + v.norm_squared() * a.max_abs();
    if q < -1e-13 * scale {
        return Err(Error::NegativeQuadraticForm { value: q });
    }
    Ok(q.max(0.0))
}

impl DiscreteSystem {
    pub fn assemble(mesh: &PolygonalMesh, k: usize, mass_mode: MassMode) -> Result<Self> {
        Self::assemble_with_scale(mesh, k, mass_mode, 1.0)
    }

    /// As [`DiscreteSystem::assemble`] with the stiffness stabilization scaled by `stab_scale`.
    pub fn assemble_with_scale(mesh: &PolygonalMesh, k: usize, mass_mode: MassMode, stab_scale: f64) -> Result<Self> {
        if !(stab_scale > 0.0) {
            return Err(Error::InvalidArgument(format!("stabilization scale {stab_scale} must be positive")));
        }
        let layout = DofLayout::new(mesh, k)?;
        let built: Vec<(ElementData, DMatrix<f64>, DMatrix<f64>)> = (0..mesh.num_cells())
            .into_par_iter()
            .map(|c| {
                let element = VemElement::new(c, mesh.cell_polygon(c), k)?;
                let pack = build_projectors(&element)?;
                let kl = local_stiffness(&pack, stab_scale);
                let ml = local_mass(&pack, &element, mass_mode);
                Ok((ElementData::new(element, pack), kl, ml))
            })
            .collect::<Result<_>>()?;

        for (data, _, _) in &built {
            check_local_points(&layout, data)?;
        }

        let n = layout.n_total();
        let cap: usize = built.iter().map(|(d, _, _)| d.element.n_dofs().pow(2)).sum();
        let mut kb = TripletBuilder::with_capacity(n, n, cap);
        let mut mb = TripletBuilder::with_capacity(n, n, cap);
        for (data, kl, ml) in &built {
            let map = &layout.cell_dofs[data.element.cell];
            for (j, &gj) in map.iter().enumerate() {
                for (i, &gi) in map.iter().enumerate() {
                    kb.push(gi, gj, kl[(i, j)]);
                    mb.push(gi, gj, ml[(i, j)]);
                }
            }
        }
        let k_full = kb.build();
        let m_full = mb.build();
        let elements = built.into_iter().map(|(d, _, _)| d).collect();
        Ok(Self::from_full(k, mass_mode, layout, k_full, m_full, elements))
    }

    fn from_full(
        degree: usize,
        mass_mode: MassMode,
        layout: DofLayout,
        k_full: CscMatrix,
        m_full: CscMatrix,
        elements: Vec<ElementData>,
    ) -> Self {
        let nf = layout.n_free();
        let nb = layout.n_boundary();
        let k = k_full.select(&layout.free_index, nf, &layout.free_index, nf);
        let m = m_full.select(&layout.free_index, nf, &layout.free_index, nf);
        let k_fb = k_full.select(&layout.free_index, nf, &layout.boundary_index, nb);
        Self {
            degree,
            mass_mode,
            layout,
            k,
            m,
            k_full,
            m_full,
            k_fb,
            elements,
        }
    }

    /// A system given directly by dense matrices, every DOF free.
    pub fn from_matrices(k: &DMatrix<f64>, m: &DMatrix<f64>) -> Self {
        assert_eq!(k.shape(), m.shape(), "K and M must have the same shape");
        assert_eq!(k.nrows(), k.ncols(), "K must be square");
        let layout = DofLayout::all_free(k.nrows());
        Self::from_full(
            1,
            MassMode::Stabilized,
            layout,
            CscMatrix::from_dense(k),
            CscMatrix::from_dense(m),
            Vec::new(),
        )
    }

    /// Number of free DOFs.
    pub fn ndof(&self) -> usize {
        self.layout.n_free()
    }

    pub fn elements(&self) -> &[ElementData] {
        &self.elements
    }

    /// DOF values of `u` on every global DOF, boundary included.
    pub fn interpolate_full(&self, u: impl Fn(&Point) -> f64 + Sync) -> DVector<f64> {
        let mut full = DVector::zeros(self.layout.n_total());
        let locals: Vec<DVector<f64>> = self.elements.par_iter().map(|d| d.element.dofs_of(&u)).collect();
        for (d, local) in self.elements.iter().zip(locals) {
            for (i, &g) in self.layout.cell_dofs[d.element.cell].iter().enumerate() {
                full[g] = local[i];
            }
        }
        full
    }

    pub fn interpolate(&self, u: impl Fn(&Point) -> f64 + Sync) -> DVector<f64> {
        let full = self.interpolate_full(u);
        let worst = self
            .layout
            .boundary_dofs()
            .iter()
            .map(|&g| full[g].abs())
            .fold(0.0, f64::max);
        if worst > BOUNDARY_TOL {
            warn!("interpolated function is {worst:.3e} on the boundary; boundary values dropped");
        }
        self.layout.restrict(&full)
    }

    /// Load vector `b_i = \sum_E \int_E f Pi0 phi_i` on every global DOF.
    pub fn load_vector_full(&self, f: impl Fn(&Point) -> f64 + Sync) -> DVector<f64> {
        let mut full = DVector::zeros(self.layout.n_total());
        let locals: Vec<DVector<f64>> = self
            .elements
            .par_iter()
            .map(|d| {
                let samples = DVector::from_iterator(d.element.quadrature.len(), d.element.quadrature.points.iter().map(&f));
                &d.load_operator * samples
            })
            .collect();
        for (d, local) in self.elements.iter().zip(locals) {
            for (i, &g) in self.layout.cell_dofs[d.element.cell].iter().enumerate() {
                full[g] += local[i];
            }
        }
        full
    }

    /// Load vector restricted to the free DOFs.
    pub fn load_vector(&self, f: impl Fn(&Point) -> f64 + Sync) -> DVector<f64> {
        self.layout.restrict(&self.load_vector_full(f))
    }

    pub fn discrete_norms(&self, v: &DVector<f64>) -> Result<(f64, f64)> {
        Ok((checked_form(&self.k, v)?.sqrt(), checked_form(&self.m, v)?.sqrt()))
    }

    /// Discrete norms of a full vector, boundary entries included.
    pub fn discrete_norms_full(&self, v: &DVector<f64>) -> Result<(f64, f64)> {
        Ok((checked_form(&self.k_full, v)?.sqrt(), checked_form(&self.m_full, v)?.sqrt()))
    }

    /// Local DOF values of cell `c` taken from a full vector.
    pub fn local_values(&self, c: usize, full: &DVector<f64>) -> DVector<f64> {
        let map = &self.layout.cell_dofs[c];
        DVector::from_iterator(map.len(), map.iter().map(|&g| full[g]))
    }

    /// Monomial coefficients of `Pi_nabla v` on cell `c`.
    pub fn energy_projection(&self, c: usize, full: &DVector<f64>) -> DVector<f64> {
        &self.elements[c].pack.pi_nabla_star * self.local_values(c, full)
    }

    /// `|| u - Pi0 v ||_{L2}` summed over cells, for a full DOF vector `v`.
    pub fn l2_projection_error(&self, full: &DVector<f64>, u: impl Fn(&Point) -> f64 + Sync) -> Result<f64> {
        let parts: Vec<f64> = self
            .elements
            .par_iter()
            .map(|d| {
                let el = &d.element;
                let coeffs = &d.pack.pi_zero_star * self.local_values(el.cell, full);
                let rule = polygon_quadrature(&el.polygon, 2 * el.degree + 2)?;
                Ok(rule.integrate(|x| (u(x) - el.eval_polynomial(&coeffs, x)).powi(2)))
            })
            .collect::<Result<_>>()?;
        Ok(parts.iter().sum::<f64>().sqrt())
    }
}

/// Local and global DOF points must coincide; a mismatch means the mesh and
/// the numbering disagree.
fn check_local_points(layout: &DofLayout, data: &ElementData) -> Result<()> {
    let el = &data.element;
    let map = &layout.cell_dofs[el.cell];
    if map.len() != el.n_dofs() {
        return Err(Error::Assembly(format!("cell {}: local and global DOF counts differ", el.cell)));
    }
    for (i, &g) in map.iter().enumerate() {
        if matches!(el.dofs.kinds[i], DofKind::Moment(_)) {
            continue;
        }
        let (Some(p), Some(q)) = (el.dofs.points[i], layout.points[g]) else {
            return Err(Error::Assembly(format!("cell {}: DOF {i} has no point", el.cell)));
        };
        if (p - q).norm() > 1e-9 * el.diameter {
            return Err(Error::Assembly(format!(
                "cell {}: local DOF {i} at {p} does not match global DOF {g} at {q}",
                el.cell
            )));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use nalgebra::SymmetricEigen;

    use super::*;
    use crate::mesh::{generate_grid_mesh, generate_voronoi_mesh};

    #[test]
    fn single_interior_vertex() {
        let mesh = generate_grid_mesh(2).unwrap();
        let sys = assemble(&mesh, 1, MassMode::Stabilized).unwrap();
        assert_eq!(sys.ndof(), 1);
        assert!(sys.k.get(0, 0) > 0.0);
    }

    #[test]
    fn entity_counting() {
        let mesh = generate_grid_mesh(4).unwrap();
        let sys = assemble(&mesh, 2, MassMode::Stabilized).unwrap();
        assert_eq!(sys.ndof(), 9 + 24 + 16);
        let sys = assemble(&mesh, 3, MassMode::Stabilized).unwrap();
        assert_eq!(sys.ndof(), 9 + 2 * 24 + 3 * 16);
        let sys = assemble(&mesh, 1, MassMode::Stabilized).unwrap();
        assert_eq!(sys.ndof(), 9);
    }

    #[test]
    fn symmetric_positive_definite() {
        let mesh = generate_voronoi_mesh(20, 5, 10).unwrap();
        for k in 1..=3 {
            let sys = assemble(&mesh, k, MassMode::Stabilized).unwrap();
            assert_eq!(sys.k.asymmetry(), 0.0);
            assert_eq!(sys.m.asymmetry(), 0.0);
            let ek = SymmetricEigen::new(sys.k.to_dense()).eigenvalues;
            let em = SymmetricEigen::new(sys.m.to_dense()).eigenvalues;
            assert!(ek.min() > 0.0 && em.min() > 0.0, "k={k}");
        }
    }

    #[test]
    fn elimination_before_equals_after() {
        let mesh = generate_voronoi_mesh(15, 2, 5).unwrap();
        let sys = assemble(&mesh, 2, MassMode::Stabilized).unwrap();
        let n = sys.ndof();
        let mut kb = TripletBuilder::new(n, n);
        for d in sys.elements() {
            let kl = local_stiffness(&d.pack, 1.0);
            let map = &sys.layout.cell_dofs[d.element.cell];
            for (j, &gj) in map.iter().enumerate() {
                for (i, &gi) in map.iter().enumerate() {
                    if let (Some(fi), Some(fj)) = (sys.layout.free_index(gi), sys.layout.free_index(gj)) {
                        kb.push(fi, fj, kl[(i, j)]);
                    }
                }
            }
        }
        assert_eq!(kb.build().to_dense(), sys.k.to_dense());
    }

    #[test]
    fn deterministic_assembly() {
        let mesh = generate_voronoi_mesh(30, 9, 5).unwrap();
        let a = assemble(&mesh, 2, MassMode::Stabilized).unwrap();
        let b = assemble(&mesh, 2, MassMode::Stabilized).unwrap();
        assert_eq!(a.k, b.k);
        assert_eq!(a.m, b.m);
    }

    #[test]
    fn zero_function_and_norms() {
        let mesh = generate_grid_mesh(3).unwrap();
        let sys = assemble(&mesh, 2, MassMode::Stabilized).unwrap();
        let v = sys.interpolate(|_| 0.0);
        assert_eq!(v.amax(), 0.0);
        assert_eq!(sys.discrete_norms(&v).unwrap(), (0.0, 0.0));
        let w = sys.interpolate(|p| (PI * p.x).sin() * (PI * p.y).sin());
        let (a, b) = sys.discrete_norms(&w).unwrap();
        let (a2, b2) = sys.discrete_norms(&(&w * 2.0)).unwrap();
        assert!((a2 - 2.0 * a).abs() <= 1e-14 * a && (b2 - 2.0 * b).abs() <= 1e-14 * b);
        // Cauchy-Schwarz in the induced inner product
        let z = sys.interpolate(|p| p.x * p.y * (1.0 - p.x) * (1.0 - p.y));
        let (za, _) = sys.discrete_norms(&z).unwrap();
        assert!((w.dot(&sys.k.mul_vec(&z))).abs() <= a * za * (1.0 + 1e-14));
    }

    #[test]
    fn polynomial_seminorm_is_exact() {
        let mesh = generate_voronoi_mesh(12, 4, 10).unwrap();
        for k in 1..=3 {
            let sys = assemble(&mesh, k, MassMode::Stabilized).unwrap();
            let u = |p: &Point| match k {
                1 => 2.0 * p.x - p.y,
                2 => p.x * p.x - 3.0 * p.x * p.y + p.y,
                _ => p.x.powi(3) - p.x * p.y * p.y + 0.5 * p.y,
            };
            let exact = match k {
                1 => 5.0,
                // grad = (2x - 3y, -3x + 1)
                2 => {
                    let rule = polygon_quadrature(
                        &[Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(1.0, 1.0), Point::new(0.0, 1.0)],
                        4,
                    )
                    .unwrap();
                    rule.integrate(|p| (2.0 * p.x - 3.0 * p.y).powi(2) + (1.0 - 3.0 * p.x).powi(2))
                }
                _ => {
                    let rule = polygon_quadrature(
                        &[Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(1.0, 1.0), Point::new(0.0, 1.0)],
                        6,
                    )
                    .unwrap();
                    rule.integrate(|p| (3.0 * p.x * p.x - p.y * p.y).powi(2) + (0.5 - 2.0 * p.x * p.y).powi(2))
                }
            };
            let full = sys.interpolate_full(u);
            let (h1, _) = sys.discrete_norms_full(&full).unwrap();
            assert!((h1 * h1 - exact).abs() <= 1e-10 * exact, "k={k}: {} vs {exact}", h1 * h1);
        }
    }

    #[test]
    fn single_interior_dof_seminorm() {
        let mesh = generate_grid_mesh(2).unwrap();
        let sys = assemble(&mesh, 1, MassMode::Stabilized).unwrap();
        let full = sys.interpolate_full(|p| p.x - 2.0 * p.y);
        let (h1, l2) = sys.discrete_norms_full(&full).unwrap();
        assert!((h1 * h1 - 5.0).abs() < 1e-12);
        // \int (x - 2y)^2 = 1/3 - 1 + 4/3
        assert!((l2 * l2 - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn interpolation_converges_at_order_k_plus_one() {
        let u = |p: &Point| (PI * p.x).sin() * (PI * p.y).sin();
        for k in 1..=2 {
            let mut hs = Vec::new();
            let mut errs = Vec::new();
            for n in [50, 200, 800] {
                let mesh = generate_voronoi_mesh(n, 7, 30).unwrap();
                let sys = assemble(&mesh, k, MassMode::Stabilized).unwrap();
                let full = sys.interpolate_full(u);
                hs.push(mesh.h_max());
                errs.push(sys.l2_projection_error(&full, u).unwrap());
            }
            for i in 0..2 {
                let rate = (errs[i] / errs[i + 1]).ln() / (hs[i] / hs[i + 1]).ln();
                assert!((rate - (k as f64 + 1.0)).abs() <= 0.25, "k={k} rate {rate} errs {errs:?}");
            }
        }
    }

    #[test]
    fn constant_load_integrates_area() {
        let mesh = generate_voronoi_mesh(20, 1, 5).unwrap();
        for k in 1..=3 {
            let sys = assemble(&mesh, k, MassMode::Stabilized).unwrap();
            let b = sys.load_vector_full(|_| 1.0);
            let ones = sys.interpolate_full(|_| 1.0);
            assert!((b.dot(&ones) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn from_matrices_is_all_free() {
        let k = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 4.0]));
        let sys = DiscreteSystem::from_matrices(&k, &DMatrix::identity(2, 2));
        assert_eq!(sys.ndof(), 2);
        assert_eq!(sys.k.to_dense(), k);
    }

    #[test]
    fn nearest_dof_prefers_lowest_index() {
        let mesh = generate_grid_mesh(2).unwrap();
        let sys = assemble(&mesh, 2, MassMode::Stabilized).unwrap();
        let i = sys.layout.nearest_free_dof(&Point::new(0.5, 0.5)).unwrap();
        assert_eq!(sys.layout.points[sys.layout.free_dofs()[i]], Some(Point::new(0.5, 0.5)));
        // four vertices at equal distance up to round-off: the first one wins
        let sys = assemble(&generate_grid_mesh(50).unwrap(), 1, MassMode::Stabilized).unwrap();
        let i = sys.layout.nearest_free_dof(&Point::new(0.05, 0.05)).unwrap();
        let p = sys.layout.points[sys.layout.free_dofs()[i]].unwrap();
        assert!((p.x - 0.04).abs() < 1e-15 && (p.y - 0.04).abs() < 1e-15, "{p:?}");
    }
}
