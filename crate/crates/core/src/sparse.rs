//! Coordinate-format sparse matrices and hard thresholding.

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Result};

/// One stored entry of a [`SparseMatrix`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Triplet {
    pub row: usize,
    pub col: usize,
    pub value: f64,
}

/// `rows x cols` matrix stored as (row, col, value) triplets in column-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Triplet>,
}

impl SparseMatrix {
    pub fn new(rows: usize, cols: usize, mut entries: Vec<Triplet>) -> Result<Self> {
        for t in &entries {
            check_dim(rows, rows.max(t.row + 1))?;
            check_dim(cols, cols.max(t.col + 1))?;
        }
        entries.sort_by_key(|t| (t.col, t.row));
        Ok(Self { rows, cols, entries })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: Vec::new(),
        }
    }

    /// Keeps the entries of `dense` with `|x| >= zeta`.
    pub fn hard_threshold(dense: &Array2<f64>, zeta: f64) -> Self {
        let (rows, cols) = dense.dim();
        let keep = |x: f64| x.abs() >= zeta && x != 0.0;
        // Branch-free compaction in memory order (the kept fraction is
        // often near one half, which defeats branch prediction), then a
        // counting sort into column-major order.
        let placeholder = Triplet { row: 0, col: 0, value: 0.0 };
        let mut kept = vec![placeholder; rows * cols + 1];
        let mut len = 0;
        let mut counts = vec![0usize; cols + 1];
        for (row, values) in dense.rows().into_iter().enumerate() {
            for (col, &value) in values.iter().enumerate() {
                kept[len] = Triplet { row, col, value };
                let k = keep(value) as usize;
                len += k;
                counts[col + 1] += k;
            }
        }
        kept.truncate(len);
        for col in 0..cols {
            counts[col + 1] += counts[col];
        }
        let mut entries = vec![placeholder; len];
        for t in kept {
            entries[counts[t.col]] = t;
            counts[t.col] += 1;
        }
        Self { rows, cols, entries }
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[Triplet] {
        &self.entries
    }

    pub fn to_dense(&self) -> Array2<f64> {
        let mut out = Array2::zeros((self.rows, self.cols));
        for t in &self.entries {
            out[(t.row, t.col)] = t.value;
        }
        out
    }
}

/// Entrywise `x * 1(|x| >= zeta)`.
pub fn hard_threshold_dense(dense: &Array2<f64>, zeta: f64) -> Array2<f64> {
    dense.mapv(|x| if x.abs() >= zeta { x } else { 0.0 })
}
