use crate::geometry::{dim_p, edge_gauss_lobatto, Point};

/// What a local degree of freedom measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DofKind {
    /// Value at the `i`-th vertex of the cell loop.
    Vertex(usize),
    /// Value at the `node`-th interior Gauss–Lobatto point of side `edge`
    /// (side `i` runs from vertex `i` to vertex `i + 1`).
    EdgeNode { edge: usize, node: usize },
    /// Scaled moment `(1/|E|) \int_E v m_alpha` for `|alpha| <= k - 2`.
    Moment(usize),
}

/// Local degrees of freedom of one cell: vertex values, then edge-node values
/// side by side, then interior moments in graded-lex order.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalDofSet {
    pub cell: usize,
    pub degree: usize,
    pub n_vertices: usize,
    pub kinds: Vec<DofKind>,
    /// Evaluation point of each point-value DOF; `None` for moments.
    pub points: Vec<Option<Point>>,
}

impl LocalDofSet {
    /// `n_E k + k(k-1)/2`
    pub const fn count(n_vertices: usize, k: usize) -> usize {
        n_vertices * k + k * (k - 1) / 2
    }

    pub fn len(&self) -> usize {
        self.kinds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kinds.is_empty()
    }

    pub fn edge_node(&self, edge: usize, node: usize) -> usize {
        self.n_vertices + edge * (self.degree - 1) + node
    }

    pub fn moment(&self, alpha: usize) -> usize {
        self.n_vertices * self.degree + alpha
    }

    pub fn num_moments(&self) -> usize {
        dim_p(self.degree as isize - 2)
    }
}

pub fn build_dofs(cell: usize, polygon: &[Point], k: usize) -> LocalDofSet {
    assert!((1..=3).contains(&k), "degree must be 1, 2 or 3");
    let n = polygon.len();
    let mut kinds = Vec::with_capacity(LocalDofSet::count(n, k));
    let mut points = Vec::with_capacity(kinds.capacity());
    for (i, p) in polygon.iter().enumerate() {
        kinds.push(DofKind::Vertex(i));
        points.push(Some(*p));
    }
    for i in 0..n {
        let nodes = edge_gauss_lobatto(k, &polygon[i], &polygon[(i + 1) % n]);
        for (j, p) in nodes.into_iter().enumerate() {
            kinds.push(DofKind::EdgeNode { edge: i, node: j });
            points.push(Some(p));
        }
    }
    for a in 0..dim_p(k as isize - 2) {
        kinds.push(DofKind::Moment(a));
        points.push(None);
    }
    debug_assert_eq!(kinds.len(), LocalDofSet::count(n, k));
    LocalDofSet {
        cell,
        degree: k,
        n_vertices: n,
        kinds,
        points,
    }
}
