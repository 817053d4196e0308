//! Dense matrices over an exact field.
//!
//! Matrices act on column vectors: column `j` holds the image of basis
//! vector `j`.

use std::fmt;

use crate::scalars::{Field, Scalar};

#[derive(Clone, PartialEq, Eq)]
pub struct Matrix {
    field: Field,
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} over {}", self.rows, self.cols, self.field)?;
        for r in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|c| self.get(r, c).to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl Matrix {
    pub fn zeros(field: Field, rows: usize, cols: usize) -> Matrix {
        Matrix { field, rows, cols, data: vec![field.zero(); rows * cols] }
    }

    pub fn identity(field: Field, n: usize) -> Matrix {
        let mut m = Matrix::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, field.one());
        }
        m
    }

    pub fn diagonal(field: Field, diag: &[Scalar]) -> Matrix {
        let mut m = Matrix::zeros(field, diag.len(), diag.len());
        for (i, d) in diag.iter().enumerate() {
            m.set(i, i, d.clone());
        }
        m
    }

    pub fn from_rows(field: Field, rows: &[Vec<Scalar>]) -> Matrix {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let mut m = Matrix::zeros(field, r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged rows");
            for (j, v) in row.iter().enumerate() {
                m.set(i, j, v.clone());
            }
        }
        m
    }

    pub fn from_int_rows(field: Field, rows: &[&[i64]]) -> Matrix {
        let rows: Vec<Vec<Scalar>> = rows.iter().map(|r| r.iter().map(|&v| field.from_int(v)).collect()).collect();
        if rows.is_empty() {
            return Matrix::zeros(field, 0, 0);
        }
        Matrix::from_rows(field, &rows)
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &Scalar {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Scalar) {
        self.data[r * self.cols + c] = v;
    }

    pub fn add_to(&mut self, r: usize, c: usize, v: &Scalar) {
        let cur = &self.data[r * self.cols + c];
        self.data[r * self.cols + c] = cur + v;
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Scalar::is_zero)
    }

    pub fn column(&self, c: usize) -> Vec<Scalar> {
        (0..self.rows).map(|r| self.get(r, c).clone()).collect()
    }

    pub fn nonzero_entries(&self) -> impl Iterator<Item = (usize, usize, &Scalar)> + '_ {
        self.data
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.is_zero())
            .map(move |(i, v)| (i / self.cols, i % self.cols, v))
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.field, self.cols, self.rows);
        for (r, c, v) in self.nonzero_entries() {
            t.set(c, r, v.clone());
        }
        t
    }

    pub fn scale(&self, s: &Scalar) -> Matrix {
        let mut out = self.clone();
        for v in out.data.iter_mut() {
            if !v.is_zero() {
                *v = &*v * s;
            }
        }
        out
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch");
        let mut out = self.clone();
        for (r, c, v) in other.nonzero_entries() {
            out.add_to(r, c, v);
        }
        out
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        self.add(&other.scale(&self.field.from_int(-1)))
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "shape mismatch in product");
        let mut out = Matrix::zeros(self.field, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        out.add_to(i, j, &(a * b));
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(self.cols, v.len());
        let mut out = vec![self.field.zero(); self.rows];
        for (r, c, a) in self.nonzero_entries() {
            if !v[c].is_zero() {
                out[r] = &out[r] + &(a * &v[c]);
            }
        }
        out
    }

    /// Kronecker product `self ⊗ other`; index `(i, k)` maps to `i * other.rows + k`.
    pub fn kron(&self, other: &Matrix) -> Matrix {
        let mut out = Matrix::zeros(self.field, self.rows * other.rows, self.cols * other.cols);
        for (i, j, a) in self.nonzero_entries() {
            for (k, l, b) in other.nonzero_entries() {
                out.set(i * other.rows + k, j * other.cols + l, a * b);
            }
        }
        out
    }

    /// Submatrix on the given row and column index lists.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Matrix {
        let mut out = Matrix::zeros(self.field, rows.len(), cols.len());
        for (i, &r) in rows.iter().enumerate() {
            for (j, &c) in cols.iter().enumerate() {
                let v = self.get(r, c);
                if !v.is_zero() {
                    out.set(i, j, v.clone());
                }
            }
        }
        out
    }

    pub fn hstack(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.rows, other.rows);
        let mut out = Matrix::zeros(self.field, self.rows, self.cols + other.cols);
        for (r, c, v) in self.nonzero_entries() {
            out.set(r, c, v.clone());
        }
        for (r, c, v) in other.nonzero_entries() {
            out.set(r, self.cols + c, v.clone());
        }
        out
    }

    /// Reduced row echelon form together with the pivot columns.
    pub fn rref(&self) -> (Matrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..m.cols {
            if row == m.rows {
                break;
            }
            let Some(p) = (row..m.rows).find(|&r| !m.get(r, col).is_zero()) else {
                continue;
            };
            m.swap_rows(row, p);
            let inv = m.get(row, col).inv().expect("pivot is nonzero");
            for c in col..m.cols {
                let v = m.get(row, c);
                if !v.is_zero() {
                    let nv = v * &inv;
                    m.set(row, c, nv);
                }
            }
            for r in 0..m.rows {
                if r == row {
                    continue;
                }
                let factor = m.get(r, col).clone();
                if factor.is_zero() {
                    continue;
                }
                for c in col..m.cols {
                    let pv = m.get(row, c);
                    if !pv.is_zero() {
                        let nv = m.get(r, c) - &(&factor * pv);
                        m.set(r, c, nv);
                    }
                }
            }
            pivots.push(col);
            row += 1;
        }
        (m, pivots)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    pub fn rank(&self) -> usize {
        if self.rows == 0 || self.cols == 0 {
            return 0;
        }
        self.rref().1.len()
    }

    /// A basis of `{x : self · x = 0}`, returned as the columns of a matrix.
    pub fn nullspace(&self) -> Matrix {
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut out = Matrix::zeros(self.field, self.cols, free.len());
        for (k, &f) in free.iter().enumerate() {
            out.set(f, k, self.field.one());
            for (pr, &pc) in pivots.iter().enumerate() {
                let v = r.get(pr, f);
                if !v.is_zero() {
                    out.set(pc, k, -v);
                }
            }
        }
        out
    }

    /// Some `x` with `self · x = b`, if one exists.
    pub fn solve(&self, b: &[Scalar]) -> Option<Vec<Scalar>> {
        assert_eq!(b.len(), self.rows);
        let bm = Matrix::from_rows(self.field, &b.iter().map(|v| vec![v.clone()]).collect::<Vec<_>>());
        let aug = if self.rows == 0 { Matrix::zeros(self.field, 0, self.cols + 1) } else { self.hstack(&bm) };
        let (r, pivots) = aug.rref();
        if pivots.contains(&self.cols) {
            return None;
        }
        let mut x = vec![self.field.zero(); self.cols];
        for (pr, &pc) in pivots.iter().enumerate() {
            x[pc] = r.get(pr, self.cols).clone();
        }
        Some(x)
    }

    /// Solves `self · X = B` column by column.
    pub fn solve_matrix(&self, b: &Matrix) -> Option<Matrix> {
        let mut out = Matrix::zeros(self.field, self.cols, b.cols);
        if b.cols == 0 {
            return Some(out);
        }
        let aug = self.hstack(b);
        let (r, pivots) = aug.rref();
        if pivots.iter().any(|&p| p >= self.cols) {
            return None;
        }
        for (pr, &pc) in pivots.iter().enumerate() {
            for j in 0..b.cols {
                out.set(pc, j, r.get(pr, self.cols + j).clone());
            }
        }
        Some(out)
    }
}

/// Dimensions of the homology of a finite complex given by a degree list and
/// a square differential that lowers degree by one. Returns `(degree, dim)`
/// for every degree in the support of the basis, in increasing order.
pub fn homology_dimensions(degrees: &[i32], differential: &Matrix) -> Vec<(i32, usize)> {
    let mut ds: Vec<i32> = degrees.to_vec();
    ds.sort_unstable();
    ds.dedup();
    let idx = |d: i32| -> Vec<usize> { (0..degrees.len()).filter(|&i| degrees[i] == d).collect() };
    ds.iter()
        .map(|&d| {
            let here = idx(d);
            let below = idx(d - 1);
            let above = idx(d + 1);
            let out_rank = if below.is_empty() { 0 } else { differential.select(&below, &here).rank() };
            let in_rank = if above.is_empty() { 0 } else { differential.select(&here, &above).rank() };
            (d, here.len() - out_rank - in_rank)
        })
        .collect()
}
