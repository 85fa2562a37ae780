use std::fmt::Write as _;

use nalgebra::{DMatrix, DVector};

/// Compressed sparse column matrix with sorted row indices and no duplicates.
#[derive(Debug, Clone, PartialEq)]
pub struct CscMatrix {
    nrows: usize,
    ncols: usize,
    col_ptr: Vec<usize>,
    row_idx: Vec<usize>,
    values: Vec<f64>,
}

/// Coordinate-format accumulator. Duplicates are summed in insertion order,
/// so the result is reproducible for a fixed insertion sequence.
#[derive(Debug, Clone)]
pub struct TripletBuilder {
    nrows: usize,
    ncols: usize,
    entries: Vec<(usize, usize, f64)>,
}

impl TripletBuilder {
    pub fn new(nrows: usize, ncols: usize) -> Self {
        Self {
            nrows,
            ncols,
            entries: Vec::new(),
        }
    }

    pub fn with_capacity(nrows: usize, ncols: usize, cap: usize) -> Self {
        Self {
            nrows,
            ncols,
            entries: Vec::with_capacity(cap),
        }
    }

    pub fn push(&mut self, row: usize, col: usize, value: f64) {
        debug_assert!(row < self.nrows && col < self.ncols);
        self.entries.push((row, col, value));
    }

    pub fn build(mut self) -> CscMatrix {
        // stable sort keeps insertion order among duplicates
        self.entries.sort_by_key(|&(r, c, _)| (c, r));
        let mut col_ptr = vec![0usize; self.ncols + 1];
        let mut row_idx = Vec::with_capacity(self.entries.len());
        let mut values: Vec<f64> = Vec::with_capacity(self.entries.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in self.entries {
            if last == Some((r, c)) {
                *values.last_mut().unwrap() += v;
            } else {
                row_idx.push(r);
                values.push(v);
                col_ptr[c + 1] += 1;
                last = Some((r, c));
            }
        }
        for c in 0..self.ncols {
            col_ptr[c + 1] += col_ptr[c];
        }
        CscMatrix {
            nrows: self.nrows,
            ncols: self.ncols,
            col_ptr,
            row_idx,
            values,
        }
    }
}

impl CscMatrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        TripletBuilder::new(nrows, ncols).build()
    }

    pub fn from_dense(a: &DMatrix<f64>) -> Self {
        let mut t = TripletBuilder::new(a.nrows(), a.ncols());
        for j in 0..a.ncols() {
            for i in 0..a.nrows() {
                if a[(i, j)] != 0.0 {
                    t.push(i, j, a[(i, j)]);
                }
            }
        }
        t.build()
    }

    pub fn identity(n: usize) -> Self {
        let mut t = TripletBuilder::new(n, n);
        for i in 0..n {
            t.push(i, i, 1.0);
        }
        t.build()
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// `(row, value)` pairs of column `j`.
    pub fn column(&self, j: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.col_ptr[j]..self.col_ptr[j + 1];
        self.row_idx[r.clone()].iter().copied().zip(self.values[r].iter().copied())
    }

    /// All stored entries as `(row, col, value)`, column-major.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.ncols).flat_map(move |j| self.column(j).map(move |(i, v)| (i, j, v)))
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let r = self.col_ptr[j]..self.col_ptr[j + 1];
        match self.row_idx[r.clone()].binary_search(&i) {
            Ok(k) => self.values[r.start + k],
            Err(_) => 0.0,
        }
    }

    pub fn mul_vec(&self, x: &DVector<f64>) -> DVector<f64> {
        let mut y = DVector::zeros(self.nrows);
        self.mul_vec_into(x, &mut y);
        y
    }

    /// `y = A x`
    pub fn mul_vec_into(&self, x: &DVector<f64>, y: &mut DVector<f64>) {
        assert_eq!(x.len(), self.ncols);
        y.fill(0.0);
        for j in 0..self.ncols {
            let xj = x[j];
            if xj == 0.0 {
                continue;
            }
            for k in self.col_ptr[j]..self.col_ptr[j + 1] {
                y[self.row_idx[k]] += self.values[k] * xj;
            }
        }
    }

    /// `x^T A x`
    pub fn quadratic_form(&self, x: &DVector<f64>) -> f64 {
        let mut acc = 0.0;
        for j in 0..self.ncols {
            let mut col = 0.0;
            for k in self.col_ptr[j]..self.col_ptr[j + 1] {
                col += self.values[k] * x[self.row_idx[k]];
            }
            acc += col * x[j];
        }
        acc
    }

    /// `alpha A + beta B` for matrices of equal shape.
    pub fn linear_combination(&self, alpha: f64, other: &CscMatrix, beta: f64) -> CscMatrix {
        assert_eq!((self.nrows, self.ncols), (other.nrows, other.ncols));
        let mut t = TripletBuilder::with_capacity(self.nrows, self.ncols, self.nnz() + other.nnz());
        for (i, j, v) in self.triplets() {
            t.push(i, j, alpha * v);
        }
        for (i, j, v) in other.triplets() {
            t.push(i, j, beta * v);
        }
        t.build()
    }

    /// Submatrix with rows `rows` and columns `cols`, where `rows[i]` is the
    /// new index of old row `i` (or `None` to drop it); likewise for columns.
    pub fn select(&self, rows: &[Option<usize>], nrows: usize, cols: &[Option<usize>], ncols: usize) -> CscMatrix {
        let mut t = TripletBuilder::new(nrows, ncols);
        for (i, j, v) in self.triplets() {
            if let (Some(r), Some(c)) = (rows[i], cols[j]) {
                t.push(r, c, v);
            }
        }
        t.build()
    }

    pub fn transpose(&self) -> CscMatrix {
        let mut t = TripletBuilder::with_capacity(self.ncols, self.nrows, self.nnz());
        for (i, j, v) in self.triplets() {
            t.push(j, i, v);
        }
        t.build()
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut a = DMatrix::zeros(self.nrows, self.ncols);
        for (i, j, v) in self.triplets() {
            a[(i, j)] = v;
        }
        a
    }

    /// Largest `|a_ij - a_ji|`.
    pub fn asymmetry(&self) -> f64 {
        self.triplets()
            .map(|(i, j, v)| (v - self.get(j, i)).abs())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn diagonal(&self) -> DVector<f64> {
        DVector::from_fn(self.nrows.min(self.ncols), |i, _| self.get(i, i))
    }

    /// Coordinate text dump: one `row col value` line per entry, 0-based,
    /// sorted by row then column.
    pub fn to_coordinate_text(&self) -> String {
        let mut entries: Vec<(usize, usize, f64)> = self.triplets().collect();
        entries.sort_by_key(|&(i, j, _)| (i, j));
        let mut s = String::new();
        for (i, j, v) in entries {
            let _ = writeln!(s, "{i} {j} {v:.16e}");
        }
        s
    }
}
