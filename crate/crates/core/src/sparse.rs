//! Compressed sparse row storage shared by operators and assembled systems.

use faer::sparse::{SparseColMat, Triplet};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    nrows: usize,
    ncols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<u32>,
    values: Vec<f64>,
}

impl CsrMatrix {
    /// Builds a matrix from raw CSR arrays. Column indices within a row need
    /// not be sorted but must be unique.
    pub fn from_raw(
        nrows: usize,
        ncols: usize,
        row_ptr: Vec<usize>,
        col_idx: Vec<u32>,
        values: Vec<f64>,
    ) -> Result<Self> {
        if row_ptr.len() != nrows + 1
            || row_ptr[0] != 0
            || *row_ptr.last().unwrap() != col_idx.len()
            || col_idx.len() != values.len()
            || row_ptr.windows(2).any(|w| w[0] > w[1])
        {
            return Err(Error::Assembly("inconsistent CSR arrays".into()));
        }
        if col_idx.iter().any(|&c| c as usize >= ncols) {
            return Err(Error::Assembly("column index out of range".into()));
        }
        Ok(Self {
            nrows,
            ncols,
            row_ptr,
            col_idx,
            values,
        })
    }

    /// Matrix where every row has exactly `width` slots.
    pub fn fixed_width(
        nrows: usize,
        ncols: usize,
        width: usize,
        col_idx: Vec<u32>,
        values: Vec<f64>,
    ) -> Result<Self> {
        let row_ptr = (0..=nrows).map(|r| r * width).collect();
        Self::from_raw(nrows, ncols, row_ptr, col_idx, values)
    }

    /// Builds from a dense row-major array, dropping exact zeros.
    pub fn from_dense(rows: &[Vec<f64>]) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        let mut row_ptr = vec![0];
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        for row in rows {
            for (j, v) in row.iter().enumerate() {
                if *v != 0.0 {
                    col_idx.push(j as u32);
                    values.push(*v);
                }
            }
            row_ptr.push(col_idx.len());
        }
        Self {
            nrows,
            ncols,
            row_ptr,
            col_idx,
            values,
        }
    }

    #[inline]
    pub fn nrows(&self) -> usize {
        self.nrows
    }

    #[inline]
    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    #[inline]
    pub fn row(&self, r: usize) -> (&[u32], &[f64]) {
        let (a, b) = (self.row_ptr[r], self.row_ptr[r + 1]);
        (&self.col_idx[a..b], &self.values[a..b])
    }

    pub fn row_ptr(&self) -> &[usize] {
        &self.row_ptr
    }

    pub fn col_idx(&self) -> &[u32] {
        &self.col_idx
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    /// Multiplies every stored value in row `r` by `factor`.
    pub fn scale_row(&mut self, r: usize, factor: f64) {
        let (a, b) = (self.row_ptr[r], self.row_ptr[r + 1]);
        self.values[a..b].iter_mut().for_each(|v| *v *= factor);
    }

    /// Multiplies column `j` by `factors[j]`.
    pub fn scale_columns(&mut self, factors: &[f64]) {
        assert_eq!(factors.len(), self.ncols);
        for (v, &c) in self.values.iter_mut().zip(&self.col_idx) {
            *v *= factors[c as usize];
        }
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.ncols);
        (0..self.nrows)
            .map(|r| {
                let (c, v) = self.row(r);
                c.iter().zip(v).map(|(&c, v)| v * x[c as usize]).sum()
            })
            .collect()
    }

    pub fn mul_transpose_vec(&self, y: &[f64]) -> Vec<f64> {
        assert_eq!(y.len(), self.nrows);
        let mut out = vec![0.0; self.ncols];
        for (r, yr) in y.iter().enumerate() {
            let (c, v) = self.row(r);
            for (&c, v) in c.iter().zip(v) {
                out[c as usize] += v * yr;
            }
        }
        out
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut out = vec![vec![0.0; self.ncols]; self.nrows];
        for (r, row) in out.iter_mut().enumerate() {
            let (c, v) = self.row(r);
            for (&c, v) in c.iter().zip(v) {
                row[c as usize] += v;
            }
        }
        out
    }

    /// Number of stored entries per column.
    pub fn column_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.ncols];
        for &c in &self.col_idx {
            counts[c as usize] += 1;
        }
        counts
    }

    /// Euclidean norm of every column.
    pub fn column_norms(&self) -> Vec<f64> {
        let mut sq = vec![0.0; self.ncols];
        for (&c, v) in self.col_idx.iter().zip(&self.values) {
            sq[c as usize] += v * v;
        }
        sq.into_iter().map(f64::sqrt).collect()
    }

    /// Column-compressed copy for the sparse factorizations. Duplicate
    /// entries are summed.
    pub fn to_faer(&self) -> Result<SparseColMat<u32, f64>> {
        let mut triplets = Vec::with_capacity(self.nnz());
        for r in 0..self.nrows {
            let (c, v) = self.row(r);
            for (&c, &v) in c.iter().zip(v) {
                triplets.push(Triplet::new(r as u32, c, v));
            }
        }
        SparseColMat::try_new_from_triplets(self.nrows, self.ncols, &triplets)
            .map_err(|e| Error::Assembly(format!("sparse conversion failed: {e:?}")))
    }

    /// Row-stacks matrices with equal column counts.
    pub fn vstack(blocks: &[&CsrMatrix]) -> Result<CsrMatrix> {
        let ncols = blocks.first().map_or(0, |b| b.ncols);
        if blocks.iter().any(|b| b.ncols != ncols) {
            return Err(Error::Assembly("column mismatch in vstack".into()));
        }
        let mut row_ptr = vec![0];
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        for b in blocks {
            let base = col_idx.len();
            row_ptr.extend(b.row_ptr[1..].iter().map(|p| p + base));
            col_idx.extend_from_slice(&b.col_idx);
            values.extend_from_slice(&b.values);
        }
        Ok(CsrMatrix {
            nrows: row_ptr.len() - 1,
            ncols,
            row_ptr,
            col_idx,
            values,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn products_and_norms() {
        let a = CsrMatrix::from_dense(&[vec![1.0, 0.0, 2.0], vec![0.0, 3.0, 0.0]]);
        assert_eq!(a.nnz(), 3);
        assert_eq!(a.mul_vec(&[1.0, 1.0, 1.0]), vec![3.0, 3.0]);
        assert_eq!(a.mul_transpose_vec(&[1.0, 2.0]), vec![1.0, 6.0, 2.0]);
        assert_eq!(a.column_counts(), vec![1, 1, 1]);
        assert_eq!(a.column_norms(), vec![1.0, 3.0, 2.0]);
        let s = CsrMatrix::vstack(&[&a, &a]).unwrap();
        assert_eq!(s.nrows(), 4);
        assert_eq!(s.to_dense()[3], vec![0.0, 3.0, 0.0]);
    }

    #[test]
    fn rejects_bad_arrays() {
        assert!(CsrMatrix::from_raw(1, 2, vec![0, 1], vec![2], vec![1.0]).is_err());
        assert!(CsrMatrix::from_raw(1, 2, vec![0, 2], vec![0], vec![1.0]).is_err());
    }
}
