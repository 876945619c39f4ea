//! Coordinate (triplet) storage for the problem matrices.

use std::collections::HashSet;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One stored entry `(row, col, value)`, 0-based.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Triplet(pub usize, pub usize, pub f64);

/// A sparse matrix in coordinate form with unique, in-range entries.
#[derive(Debug, Clone, PartialEq)]
pub struct TripletMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Triplet>,
}

impl TripletMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<Triplet>) -> Result<Self> {
        let mut seen = HashSet::with_capacity(entries.len());
        for &Triplet(i, j, v) in &entries {
            if i >= rows || j >= cols {
                return Err(Error::Format(format!(
                    "entry ({i}, {j}) outside a {rows}x{cols} matrix"
                )));
            }
            if !v.is_finite() {
                return Err(Error::Format(format!("entry ({i}, {j}) is not finite")));
            }
            if !seen.insert((i, j)) {
                return Err(Error::Format(format!("duplicate entry ({i}, {j})")));
            }
        }
        Ok(Self {
            rows,
            cols,
            entries,
        })
    }

    /// Collects the nonzeros of a dense matrix in column-major order.
    pub fn from_dense(dense: &DMatrix<f64>) -> Self {
        let mut entries = Vec::new();
        for j in 0..dense.ncols() {
            for i in 0..dense.nrows() {
                let v = dense[(i, j)];
                if v != 0.0 {
                    entries.push(Triplet(i, j, v));
                }
            }
        }
        Self {
            rows: dense.nrows(),
            cols: dense.ncols(),
            entries,
        }
    }

    /// Lower triangle (diagonal included) of a square dense matrix.
    pub fn lower_from_dense(dense: &DMatrix<f64>) -> Self {
        let mut out = Self::from_dense(dense);
        out.entries.retain(|t| t.0 >= t.1);
        out
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[Triplet] {
        &self.entries
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut out = DMatrix::zeros(self.rows, self.cols);
        for &Triplet(i, j, v) in &self.entries {
            out[(i, j)] = v;
        }
        out
    }

    /// Expands a lower-triangle storage into the full symmetric matrix.
    pub fn to_dense_symmetric(&self) -> DMatrix<f64> {
        let mut out = DMatrix::zeros(self.rows, self.cols);
        for &Triplet(i, j, v) in &self.entries {
            out[(i, j)] = v;
            out[(j, i)] = v;
        }
        out
    }
}
