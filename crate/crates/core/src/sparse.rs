//! Compressed sparse row matrices.
//!
//! Every discrete operator in the crate (gradient, divergence, Laplacian and
//! their Kronecker lifts) is stored as a [`SparseMatrix`]. Matrices are built
//! from coordinate triplets, are immutable afterwards, and keep columns sorted
//! within each row so iteration order is fully determined by the input.

use std::fmt::{self, Write as _};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl SparseMatrix {
    /// Builds a matrix from `(row, col, value)` triplets.
    ///
    /// Duplicate coordinates are summed and entries that end up exactly zero
    /// are dropped.
    pub fn from_triplets(rows: usize, cols: usize, triplets: &[(usize, usize, f64)]) -> Result<Self> {
        if let Some(&(row, col, value)) = triplets.iter().find(|&&(r, c, _)| r >= rows || c >= cols) {
            return Err(Error::OutOfBounds {
                row,
                col,
                value,
                rows,
                cols,
            });
        }
        let mut sorted: Vec<(usize, usize, f64)> = triplets.to_vec();
        // stable, so duplicates are summed in input order
        sorted.sort_by_key(|&(r, c, _)| (r, c));

        let mut row_ptr = vec![0; rows + 1];
        let mut col_idx = Vec::with_capacity(sorted.len());
        let mut values = Vec::with_capacity(sorted.len());
        let mut iter = sorted.into_iter().peekable();
        while let Some((r, c, mut v)) = iter.next() {
            while let Some(&(r2, c2, v2)) = iter.peek() {
                if (r2, c2) != (r, c) {
                    break;
                }
                v += v2;
                iter.next();
            }
            if v != 0.0 {
                col_idx.push(c);
                values.push(v);
                row_ptr[r + 1] += 1;
            }
        }
        for r in 0..rows {
            row_ptr[r + 1] += row_ptr[r];
        }
        Ok(Self {
            rows,
            cols,
            row_ptr,
            col_idx,
            values,
        })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            row_ptr: vec![0; rows + 1],
            col_idx: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::diagonal(&vec![1.0; n])
    }

    pub fn diagonal(diag: &[f64]) -> Self {
        let triplets: Vec<_> = diag.iter().enumerate().map(|(i, &v)| (i, i, v)).collect();
        Self::from_triplets(diag.len(), diag.len(), &triplets).expect("diagonal entries are in bounds")
    }

    /// Dense row-major input; exact zeros are skipped.
    pub fn from_dense(dense: &[Vec<f64>]) -> Result<Self> {
        let rows = dense.len();
        let cols = dense.first().map_or(0, Vec::len);
        let mut triplets = Vec::new();
        for (i, row) in dense.iter().enumerate() {
            if row.len() != cols {
                return Err(Error::Dimension {
                    op: "from_dense",
                    lhs: (i, row.len()),
                    rhs: (rows, cols),
                });
            }
            triplets.extend(row.iter().enumerate().map(|(j, &v)| (i, j, v)));
        }
        Self::from_triplets(rows, cols, &triplets)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Column indices and values stored in row `i`.
    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let span = self.row_ptr[i]..self.row_ptr[i + 1];
        (&self.col_idx[span.clone()], &self.values[span])
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (cols, vals) = self.row(i);
        cols.binary_search(&j).map_or(0.0, |k| vals[k])
    }

    /// Stored entries in row-major order.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.rows).flat_map(move |i| {
            let (cols, vals) = self.row(i);
            cols.iter().zip(vals).map(move |(&j, &v)| (i, j, v))
        })
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut dense = vec![vec![0.0; self.cols]; self.rows];
        for (i, j, v) in self.triplets() {
            dense[i][j] = v;
        }
        dense
    }

    pub fn matvec(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut y = vec![0.0; self.rows];
        self.matvec_into(x, &mut y)?;
        Ok(y)
    }

    /// `y = A x` without allocating; used inside the time loops.
    pub fn matvec_into(&self, x: &[f64], y: &mut [f64]) -> Result<()> {
        if x.len() != self.cols || y.len() != self.rows {
            return Err(Error::Dimension {
                op: "matvec",
                lhs: self.shape(),
                rhs: (x.len(), y.len()),
            });
        }
        for (i, yi) in y.iter_mut().enumerate() {
            let (cols, vals) = self.row(i);
            *yi = cols.iter().zip(vals).map(|(&j, &v)| v * x[j]).sum();
        }
        Ok(())
    }

    /// Max absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..self.rows)
            .map(|i| self.row(i).1.iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn scale(&self, alpha: f64) -> Self {
        if alpha == 0.0 {
            return Self::zeros(self.rows, self.cols);
        }
        Self {
            values: self.values.iter().map(|v| alpha * v).collect(),
            ..self.clone()
        }
    }

    pub fn transpose(&self) -> Self {
        let triplets: Vec<_> = self.triplets().map(|(i, j, v)| (j, i, v)).collect();
        Self::from_triplets(self.cols, self.rows, &triplets).expect("transpose stays in bounds")
    }

    /// Sparse product `self * rhs`, accumulated row by row.
    pub fn matmul(&self, rhs: &SparseMatrix) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::Dimension {
                op: "matmul",
                lhs: self.shape(),
                rhs: rhs.shape(),
            });
        }
        let mut acc = vec![0.0; rhs.cols];
        let mut touched = vec![false; rhs.cols];
        let mut pattern: Vec<usize> = Vec::new();
        let mut row_ptr = Vec::with_capacity(self.rows + 1);
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        row_ptr.push(0);
        for i in 0..self.rows {
            let (a_cols, a_vals) = self.row(i);
            for (&k, &a) in a_cols.iter().zip(a_vals) {
                let (b_cols, b_vals) = rhs.row(k);
                for (&j, &b) in b_cols.iter().zip(b_vals) {
                    if !touched[j] {
                        touched[j] = true;
                        pattern.push(j);
                    }
                    acc[j] += a * b;
                }
            }
            pattern.sort_unstable();
            for &j in &pattern {
                if acc[j] != 0.0 {
                    col_idx.push(j);
                    values.push(acc[j]);
                }
                acc[j] = 0.0;
                touched[j] = false;
            }
            pattern.clear();
            row_ptr.push(col_idx.len());
        }
        Ok(Self {
            rows: self.rows,
            cols: rhs.cols,
            row_ptr,
            col_idx,
            values,
        })
    }

    /// Kronecker product `self ⊗ rhs`.
    pub fn kron(&self, rhs: &SparseMatrix) -> Self {
        let rows = self.rows * rhs.rows;
        let cols = self.cols * rhs.cols;
        let mut row_ptr = Vec::with_capacity(rows + 1);
        let mut col_idx = Vec::with_capacity(self.nnz() * rhs.nnz());
        let mut values = Vec::with_capacity(self.nnz() * rhs.nnz());
        row_ptr.push(0);
        for ia in 0..self.rows {
            let (a_cols, a_vals) = self.row(ia);
            for ib in 0..rhs.rows {
                let (b_cols, b_vals) = rhs.row(ib);
                // a_cols sorted, b_cols sorted => output columns sorted
                for (&ja, &a) in a_cols.iter().zip(a_vals) {
                    for (&jb, &b) in b_cols.iter().zip(b_vals) {
                        let v = a * b;
                        if v != 0.0 {
                            col_idx.push(ja * rhs.cols + jb);
                            values.push(v);
                        }
                    }
                }
                row_ptr.push(col_idx.len());
            }
        }
        Self {
            rows,
            cols,
            row_ptr,
            col_idx,
            values,
        }
    }

    /// Stacks `top` above `bottom`.
    pub fn vstack(top: &SparseMatrix, bottom: &SparseMatrix) -> Result<Self> {
        if top.cols != bottom.cols {
            return Err(Error::Dimension {
                op: "vstack",
                lhs: top.shape(),
                rhs: bottom.shape(),
            });
        }
        let offset = top.nnz();
        let mut row_ptr = top.row_ptr.clone();
        row_ptr.extend(bottom.row_ptr[1..].iter().map(|p| p + offset));
        let mut col_idx = top.col_idx.clone();
        col_idx.extend_from_slice(&bottom.col_idx);
        let mut values = top.values.clone();
        values.extend_from_slice(&bottom.values);
        Ok(Self {
            rows: top.rows + bottom.rows,
            cols: top.cols,
            row_ptr,
            col_idx,
            values,
        })
    }

    /// Places `left` and `right` side by side.
    pub fn hstack(left: &SparseMatrix, right: &SparseMatrix) -> Result<Self> {
        if left.rows != right.rows {
            return Err(Error::Dimension {
                op: "hstack",
                lhs: left.shape(),
                rhs: right.shape(),
            });
        }
        let mut row_ptr = Vec::with_capacity(left.rows + 1);
        let mut col_idx = Vec::with_capacity(left.nnz() + right.nnz());
        let mut values = Vec::with_capacity(left.nnz() + right.nnz());
        row_ptr.push(0);
        for i in 0..left.rows {
            let (lc, lv) = left.row(i);
            col_idx.extend_from_slice(lc);
            values.extend_from_slice(lv);
            let (rc, rv) = right.row(i);
            col_idx.extend(rc.iter().map(|j| j + left.cols));
            values.extend_from_slice(rv);
            row_ptr.push(col_idx.len());
        }
        Ok(Self {
            rows: left.rows,
            cols: left.cols + right.cols,
            row_ptr,
            col_idx,
            values,
        })
    }

    /// Coordinate dump: one `row col value` line per stored entry.
    pub fn to_triplet_text(&self) -> String {
        let mut out = String::with_capacity(self.nnz() * 32);
        for (i, j, v) in self.triplets() {
            writeln!(out, "{i} {j} {}", format_f64(v)).unwrap();
        }
        out
    }
}

impl fmt::Display for SparseMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_triplet_text())
    }
}

/// 17 significant digits, enough to round-trip any `f64`.
pub fn format_f64(v: f64) -> String {
    format!("{v:.16e}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn duplicates_are_coalesced() {
        let a = SparseMatrix::from_triplets(2, 2, &[(0, 0, 1.0), (0, 0, 2.0)]).unwrap();
        assert_eq!(a.nnz(), 1);
        assert_eq!(a.get(0, 0), 3.0);
    }

    #[test]
    fn empty_triplets_give_zero_matrix() {
        let a = SparseMatrix::from_triplets(2, 2, &[]).unwrap();
        assert_eq!(a.nnz(), 0);
        assert_eq!(a, SparseMatrix::zeros(2, 2));
    }

    #[test]
    fn out_of_bounds_names_the_entry() {
        let err = SparseMatrix::from_triplets(1, 2, &[(0, 5, 1.0)]).unwrap_err();
        assert_eq!(
            err,
            Error::OutOfBounds {
                row: 0,
                col: 5,
                value: 1.0,
                rows: 1,
                cols: 2
            }
        );
        assert!(err.to_string().contains("(0, 5)"));
    }

    #[test]
    fn cancelling_duplicates_and_explicit_zeros_are_dropped() {
        let a = SparseMatrix::from_triplets(2, 2, &[(0, 1, 1.5), (1, 1, 0.0), (0, 1, -1.5)]).unwrap();
        assert_eq!(a.nnz(), 0);
    }

    #[test]
    fn identity_and_zero_matvec() {
        let y = SparseMatrix::identity(3).matvec(&[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(y, vec![1.0, 2.0, 3.0]);
        let y = SparseMatrix::zeros(2, 2).matvec(&[5.0, 7.0]).unwrap();
        assert_eq!(y, vec![0.0, 0.0]);
    }

    #[test]
    fn matvec_length_mismatch() {
        let err = SparseMatrix::identity(3).matvec(&[1.0, 2.0]).unwrap_err();
        assert!(matches!(err, Error::Dimension { op: "matvec", .. }));
    }

    #[test]
    fn matmul_small_cases() {
        let i3 = SparseMatrix::identity(3);
        assert_eq!(i3.matmul(&i3).unwrap(), i3);

        let b = SparseMatrix::from_triplets(3, 4, &[(0, 0, 1.0), (2, 3, -2.0), (1, 1, 4.0)]).unwrap();
        let z = SparseMatrix::zeros(2, 3).matmul(&b).unwrap();
        assert_eq!(z, SparseMatrix::zeros(2, 4));

        let err = SparseMatrix::zeros(2, 3)
            .matmul(&SparseMatrix::zeros(2, 3))
            .unwrap_err();
        assert!(matches!(err, Error::Dimension { op: "matmul", .. }));
    }

    #[test]
    fn kron_basics() {
        let i6 = SparseMatrix::identity(2).kron(&SparseMatrix::identity(3));
        assert_eq!(i6, SparseMatrix::identity(6));

        let b = SparseMatrix::from_dense(&[vec![1.0, -2.0], vec![0.0, 3.5]]).unwrap();
        let two = SparseMatrix::from_dense(&[vec![2.0]]).unwrap();
        assert_eq!(two.kron(&b), b.scale(2.0));
    }

    #[test]
    fn kron_entry_layout() {
        let a = SparseMatrix::from_dense(&[vec![1.0, 2.0], vec![3.0, 0.0]]).unwrap();
        let b = SparseMatrix::from_dense(&[vec![0.0, 5.0, 1.0]]).unwrap();
        let k = a.kron(&b);
        assert_eq!(k.shape(), (2, 6));
        let dense = k.to_dense();
        assert_eq!(dense[0], vec![0.0, 5.0, 1.0, 0.0, 10.0, 2.0]);
        assert_eq!(dense[1], vec![0.0, 15.0, 3.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn stacking() {
        let v = SparseMatrix::vstack(&SparseMatrix::zeros(1, 2), &SparseMatrix::zeros(2, 2)).unwrap();
        assert_eq!(v, SparseMatrix::zeros(3, 2));

        let h = SparseMatrix::hstack(&SparseMatrix::identity(2), &SparseMatrix::zeros(2, 3)).unwrap();
        assert_eq!(h.shape(), (2, 5));
        assert_eq!(
            h.to_dense(),
            vec![vec![1.0, 0.0, 0.0, 0.0, 0.0], vec![0.0, 1.0, 0.0, 0.0, 0.0]]
        );

        assert!(SparseMatrix::vstack(&SparseMatrix::zeros(1, 2), &SparseMatrix::zeros(1, 3)).is_err());
        assert!(SparseMatrix::hstack(&SparseMatrix::zeros(1, 2), &SparseMatrix::zeros(2, 2)).is_err());
    }

    #[test]
    fn stacking_matches_dense_blocks() {
        let a = SparseMatrix::from_dense(&[vec![1.0, 0.0], vec![0.0, 2.0]]).unwrap();
        let b = SparseMatrix::from_dense(&[vec![3.0, 4.0]]).unwrap();
        let v = SparseMatrix::vstack(&a, &b).unwrap();
        assert_eq!(v.to_dense(), vec![vec![1.0, 0.0], vec![0.0, 2.0], vec![3.0, 4.0]]);
        let c = SparseMatrix::from_dense(&[vec![7.0], vec![0.0]]).unwrap();
        let h = SparseMatrix::hstack(&a, &c).unwrap();
        assert_eq!(h.to_dense(), vec![vec![1.0, 0.0, 7.0], vec![0.0, 2.0, 0.0]]);
    }

    #[test]
    fn triplet_text_format() {
        let a = SparseMatrix::from_triplets(2, 3, &[(1, 2, -1.0 / 3.0), (0, 0, 1.0)]).unwrap();
        assert_eq!(
            a.to_triplet_text(),
            "0 0 1.0000000000000000e0\n1 2 -3.3333333333333331e-1\n"
        );
        for line in a.to_triplet_text().lines() {
            let v: f64 = line.split(' ').nth(2).unwrap().parse().unwrap();
            assert!(v == 1.0 || v == -1.0 / 3.0);
        }
    }

    #[test]
    fn transpose_swaps_entries() {
        let a = SparseMatrix::from_triplets(2, 3, &[(0, 2, 4.0), (1, 0, -1.0)]).unwrap();
        let t = a.transpose();
        assert_eq!(t.shape(), (3, 2));
        assert_eq!(t.get(2, 0), 4.0);
        assert_eq!(t.get(0, 1), -1.0);
        assert_eq!(t.transpose(), a);
    }
}
