//! Dense matrices over a prime field and the Gaussian elimination they need.

use crate::field::Field;

/// Row-major dense matrix of residues.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    /// Panics if `data.len() != rows * cols`.
    pub fn from_flat(rows: usize, cols: usize, data: Vec<u32>) -> Self {
        assert_eq!(data.len(), rows * cols, "matrix data has wrong length");
        Matrix { rows, cols, data }
    }

    pub fn from_rows(rows: &[Vec<u32>]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged rows");
            data.extend_from_slice(r);
        }
        Matrix {
            rows: rows.len(),
            cols,
            data,
        }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> u32 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: u32) {
        self.data[r * self.cols + c] = v;
    }

    #[inline]
    pub fn row(&self, r: usize) -> &[u32] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<u32>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c));
            }
        }
        t
    }

    /// The submatrix keeping only the listed columns, in the given order.
    pub fn select_columns(&self, columns: &[usize]) -> Matrix {
        let mut out = Matrix::zeros(self.rows, columns.len());
        for r in 0..self.rows {
            for (c_new, &c) in columns.iter().enumerate() {
                out.set(r, c_new, self.get(r, c));
            }
        }
        out
    }

    pub fn select_rows(&self, rows: &[usize]) -> Matrix {
        let mut data = Vec::with_capacity(rows.len() * self.cols);
        for &r in rows {
            data.extend_from_slice(self.row(r));
        }
        Matrix {
            rows: rows.len(),
            cols: self.cols,
            data,
        }
    }

    /// Row vector times matrix: `x · self`.
    pub fn left_mul_vec(&self, field: &Field, x: &[u32]) -> Vec<u32> {
        assert_eq!(x.len(), self.rows);
        let mut out = vec![0u32; self.cols];
        for (r, &xr) in x.iter().enumerate() {
            if xr == 0 {
                continue;
            }
            for (o, &g) in out.iter_mut().zip(self.row(r)) {
                *o = field.mul_add(*o, xr, g);
            }
        }
        out
    }

    /// Matrix times column vector: `self · y`.
    pub fn mul_vec(&self, field: &Field, y: &[u32]) -> Vec<u32> {
        assert_eq!(y.len(), self.cols);
        (0..self.rows)
            .map(|r| {
                self.row(r)
                    .iter()
                    .zip(y)
                    .fold(0u32, |acc, (&a, &b)| field.mul_add(acc, a, b))
            })
            .collect()
    }

    pub fn mul(&self, field: &Field, rhs: &Matrix) -> Matrix {
        assert_eq!(self.cols, rhs.rows);
        let mut out = Matrix::zeros(self.rows, rhs.cols);
        for r in 0..self.rows {
            let row = rhs.left_mul_vec(field, self.row(r));
            out.data[r * rhs.cols..(r + 1) * rhs.cols].copy_from_slice(&row);
        }
        out
    }

    /// Kronecker product `self ⊗ rhs`; row `(a, b)` sits at `a * rhs.rows + b`.
    pub fn kron(&self, field: &Field, rhs: &Matrix) -> Matrix {
        let rows = self.rows * rhs.rows;
        let cols = self.cols * rhs.cols;
        let mut out = Matrix::zeros(rows, cols);
        for a in 0..self.rows {
            for b in 0..rhs.rows {
                let r = a * rhs.rows + b;
                for c in 0..self.cols {
                    let s = self.get(a, c);
                    if s == 0 {
                        continue;
                    }
                    for e in 0..rhs.cols {
                        out.set(r, c * rhs.cols + e, field.mul(s, rhs.get(b, e)));
                    }
                }
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0)
    }

    /// Reduces in place to reduced row echelon form and returns pivot columns.
    pub fn rref(&mut self, field: &Field) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut lead = 0;
        for c in 0..self.cols {
            if lead == self.rows {
                break;
            }
            let Some(p) = (lead..self.rows).find(|&r| self.get(r, c) != 0) else {
                continue;
            };
            self.swap_rows(lead, p);
            let inv = field.inv(self.get(lead, c)).expect("pivot is nonzero");
            for e in 0..self.cols {
                let v = self.get(lead, e);
                self.set(lead, e, field.mul(v, inv));
            }
            for r in 0..self.rows {
                if r == lead {
                    continue;
                }
                let factor = self.get(r, c);
                if factor == 0 {
                    continue;
                }
                let neg = field.neg(factor);
                for e in c..self.cols {
                    let v = field.mul_add(self.get(r, e), neg, self.get(lead, e));
                    self.set(r, e, v);
                }
            }
            pivots.push(c);
            lead += 1;
        }
        pivots
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    pub fn rank(&self, field: &Field) -> usize {
        self.clone().rref(field).len()
    }

    /// Indices of a maximal set of linearly independent rows, chosen greedily
    /// in row order.
    pub fn independent_rows(&self, field: &Field) -> Vec<usize> {
        let mut basis = Matrix::zeros(0, self.cols);
        let mut kept = Vec::new();
        for r in 0..self.rows {
            let mut candidate = basis.clone();
            candidate.rows += 1;
            candidate.data.extend_from_slice(self.row(r));
            if candidate.rank(field) == kept.len() + 1 {
                kept.push(r);
                basis = candidate;
            }
        }
        kept
    }

    /// Basis of `{h : self · hᵀ = 0}` as the rows of the returned matrix.
    pub fn null_space(&self, field: &Field) -> Matrix {
        let mut reduced = self.clone();
        let pivots = reduced.rref(field);
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut basis = Matrix::zeros(free.len(), self.cols);
        for (row, &f) in free.iter().enumerate() {
            basis.set(row, f, 1);
            for (pr, &pc) in pivots.iter().enumerate() {
                basis.set(row, pc, field.neg(reduced.get(pr, f)));
            }
        }
        basis
    }

    /// Solves `x · self = target`. Returns `None` when the system is
    /// inconsistent; otherwise one solution together with the rank of `self`
    /// (the solution is unique iff the rank equals `self.rows()`).
    pub fn solve_left(&self, field: &Field, target: &[u32]) -> Option<(Vec<u32>, usize)> {
        assert_eq!(target.len(), self.cols);
        // Work on [selfᵀ | target]: selfᵀ · xᵀ = targetᵀ.
        let k = self.rows;
        let mut aug = Matrix::zeros(self.cols, k + 1);
        for c in 0..self.cols {
            for r in 0..k {
                aug.set(c, r, self.get(r, c));
            }
            aug.set(c, k, target[c]);
        }
        let pivots = aug.rref(field);
        if pivots.last() == Some(&k) {
            return None;
        }
        let mut x = vec![0u32; k];
        for (pr, &pc) in pivots.iter().enumerate() {
            x[pc] = aug.get(pr, k);
        }
        Some((x, pivots.len()))
    }
}
