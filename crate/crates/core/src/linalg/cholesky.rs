//! Envelope (skyline) Cholesky factorization under a reverse Cuthill–McKee
//! ordering. Factor once, solve many times.

use std::collections::VecDeque;

use nalgebra::DVector;

use super::CscMatrix;
use crate::error::{Error, Result};

/// Reverse Cuthill–McKee permutation of the symmetric sparsity pattern of `a`.
/// `perm[new] = old`.
pub fn reverse_cuthill_mckee(a: &CscMatrix) -> Vec<usize> {
    let n = a.ncols();
    let adj: Vec<Vec<usize>> = (0..n)
        .map(|j| a.column(j).map(|(i, _)| i).filter(|&i| i != j).collect())
        .collect();
    let degree: Vec<usize> = adj.iter().map(Vec::len).collect();
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);

    let bfs_levels = |start: usize, visited: &[bool]| -> (Vec<usize>, usize) {
        let mut level = vec![usize::MAX; n];
        let mut queue = VecDeque::from([start]);
        level[start] = 0;
        let mut last = vec![start];
        let mut depth = 0;
        while let Some(v) = queue.pop_front() {
            for &w in &adj[v] {
                if !visited[w] && level[w] == usize::MAX {
                    level[w] = level[v] + 1;
                    if level[w] > depth {
                        depth = level[w];
                        last.clear();
                    }
                    if level[w] == depth {
                        last.push(w);
                    }
                    queue.push_back(w);
                }
            }
        }
        (last, depth)
    };

    // Lowest-degree unvisited node starts a new component.
    while let Some(seed) = (0..n).filter(|&v| !visited[v]).min_by_key(|&v| (degree[v], v)) {
        // George-Liu pseudo-peripheral node search.
        let mut start = seed;
        let (mut last, mut depth) = bfs_levels(start, &visited);
        loop {
            let cand = *last.iter().min_by_key(|&&v| (degree[v], v)).unwrap();
            let (l2, d2) = bfs_levels(cand, &visited);
            if d2 > depth {
                start = cand;
                last = l2;
                depth = d2;
            } else {
                break;
            }
        }
        let mut queue = VecDeque::from([start]);
        visited[start] = true;
        while let Some(v) = queue.pop_front() {
            order.push(v);
            let mut nbrs: Vec<usize> = adj[v].iter().copied().filter(|&w| !visited[w]).collect();
            nbrs.sort_by_key(|&w| (degree[w], w));
            for w in nbrs {
                visited[w] = true;
                queue.push_back(w);
            }
        }
    }
    order.reverse();
    order
}

/// `A = P^T L L^T P` with `L` stored by rows over its envelope.
#[derive(Debug, Clone)]
pub struct SparseCholesky {
    n: usize,
    /// `perm[new] = old`
    perm: Vec<usize>,
    /// First stored column of each row of `L`.
    first: Vec<usize>,
    /// Offset of row `i` in `values`; row `i` holds `L[i, first[i]..=i]`.
    start: Vec<usize>,
    values: Vec<f64>,
}

impl SparseCholesky {
    /// Factor a symmetric positive definite matrix. Only the lower triangle
    /// (after permutation) is read.
    pub fn factor(a: &CscMatrix) -> Result<Self> {
        let perm = reverse_cuthill_mckee(a);
        Self::factor_with_ordering(a, perm)
    }

    pub fn factor_with_ordering(a: &CscMatrix, perm: Vec<usize>) -> Result<Self> {
        let n = a.ncols();
        assert_eq!(n, a.nrows(), "matrix must be square");
        let mut inv = vec![0usize; n];
        for (new, &old) in perm.iter().enumerate() {
            inv[old] = new;
        }
        let mut first: Vec<usize> = (0..n).collect();
        for (i, j, _) in a.triplets() {
            let (pi, pj) = (inv[i], inv[j]);
            let (r, c) = if pi >= pj { (pi, pj) } else { (pj, pi) };
            first[r] = first[r].min(c);
        }
        let mut start = Vec::with_capacity(n + 1);
        let mut total = 0usize;
        for i in 0..n {
            start.push(total);
            total += i - first[i] + 1;
        }
        start.push(total);
        let mut values = vec![0.0; total];
        for (i, j, v) in a.triplets() {
            let (pi, pj) = (inv[i], inv[j]);
            if pi >= pj {
                values[start[pi] + (pj - first[pi])] = v;
            }
        }

        for i in 0..n {
            let fi = first[i];
            let (done, rest) = values.split_at_mut(start[i]);
            let row_i = &mut rest[..i - fi + 1];
            for j in fi..i {
                let fj = first[j];
                let lo = fi.max(fj);
                let row_j = &done[start[j]..start[j] + (j - fj + 1)];
                let dot: f64 = row_i[lo - fi..j - fi]
                    .iter()
                    .zip(&row_j[lo - fj..j - fj])
                    .map(|(a, b)| a * b)
                    .sum();
                row_i[j - fi] = (row_i[j - fi] - dot) / row_j[j - fj];
            }
            let aii = row_i[i - fi];
            let sq: f64 = row_i[..i - fi].iter().map(|v| v * v).sum();
            let d = aii - sq;
            if !(d > 1e-14 * aii.abs()) {
                return Err(Error::NotPositiveDefinite { row: perm[i], pivot: d });
            }
            row_i[i - fi] = d.sqrt();
        }
        Ok(Self {
            n,
            perm,
            first,
            start,
            values,
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Stored entries of the factor.
    pub fn envelope_size(&self) -> usize {
        self.values.len()
    }

    pub fn solve(&self, b: &DVector<f64>) -> DVector<f64> {
        let mut x = b.clone();
        self.solve_in_place(&mut x);
        x
    }

    pub fn solve_in_place(&self, b: &mut DVector<f64>) {
        assert_eq!(b.len(), self.n);
        let mut y: Vec<f64> = self.perm.iter().map(|&old| b[old]).collect();
        // L y = Pb
        for i in 0..self.n {
            let fi = self.first[i];
            let row = &self.values[self.start[i]..self.start[i + 1]];
            let dot: f64 = row[..i - fi].iter().zip(&y[fi..i]).map(|(a, b)| a * b).sum();
            y[i] = (y[i] - dot) / row[i - fi];
        }
        // L^T x = y
        for i in (0..self.n).rev() {
            let fi = self.first[i];
            let row = &self.values[self.start[i]..self.start[i + 1]];
            y[i] /= row[i - fi];
            let xi = y[i];
            for (yk, l) in y[fi..i].iter_mut().zip(&row[..i - fi]) {
                *yk -= l * xi;
            }
        }
        for (new, &old) in self.perm.iter().enumerate() {
            b[old] = y[new];
        }
    }

    /// Smallest and largest diagonal entry of the factor.
    pub fn pivot_range(&self) -> (f64, f64) {
        (0..self.n)
            .map(|i| self.values[self.start[i + 1] - 1])
            .fold((f64::INFINITY, 0.0), |(lo, hi), d| (lo.min(d), hi.max(d)))
    }
}
