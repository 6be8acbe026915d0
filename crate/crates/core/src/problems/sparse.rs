use crate::error::{Error, Result};

/// Compressed-column sparse matrix. Columns are samples, rows are features.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseColumnMatrix {
    nrows: usize,
    col_ptr: Vec<usize>,
    row_idx: Vec<usize>,
    values: Vec<f64>,
}

impl SparseColumnMatrix {
    /// Builds from per-column `(row, value)` lists. Rows within a column must
    /// be strictly increasing; explicit zeros are dropped.
    pub fn from_columns(nrows: usize, columns: &[Vec<(usize, f64)>]) -> Result<Self> {
        let mut col_ptr = Vec::with_capacity(columns.len() + 1);
        let mut row_idx = Vec::new();
        let mut values = Vec::new();
        col_ptr.push(0);
        for (j, col) in columns.iter().enumerate() {
            let mut prev: Option<usize> = None;
            for &(r, v) in col {
                if r >= nrows {
                    return Err(Error::InvalidParameter(format!(
                        "row {r} out of range in column {j} (nrows = {nrows})"
                    )));
                }
                if prev.is_some_and(|p| r <= p) {
                    return Err(Error::InvalidParameter(format!("rows not increasing in column {j}")));
                }
                prev = Some(r);
                if v != 0.0 {
                    row_idx.push(r);
                    values.push(v);
                }
            }
            col_ptr.push(row_idx.len());
        }
        Ok(Self { nrows, col_ptr, row_idx, values })
    }

    pub fn from_dense(nrows: usize, ncols: usize, data_col_major: &[f64]) -> Self {
        let columns: Vec<Vec<(usize, f64)>> = (0..ncols)
            .map(|j| (0..nrows).map(|r| (r, data_col_major[j * nrows + r])).collect())
            .collect();
        Self::from_columns(nrows, &columns).expect("dense layout is well formed")
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.col_ptr.len() - 1
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn column(&self, j: usize) -> (&[usize], &[f64]) {
        let r = self.col_ptr[j]..self.col_ptr[j + 1];
        (&self.row_idx[r.clone()], &self.values[r])
    }

    /// `out = A x`.
    pub fn mul_vec(&self, x: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|o| *o = 0.0);
        for (j, &xj) in x.iter().enumerate() {
            if xj == 0.0 {
                continue;
            }
            let (rows, vals) = self.column(j);
            for (&r, &v) in rows.iter().zip(vals) {
                out[r] += v * xj;
            }
        }
    }

    /// `(A^T y)_j` for one column.
    pub fn column_dot(&self, j: usize, y: &[f64]) -> f64 {
        let (rows, vals) = self.column(j);
        rows.iter().zip(vals).map(|(&r, &v)| v * y[r]).sum()
    }

    /// `out = A^T y`.
    pub fn tmul_vec(&self, y: &[f64], out: &mut [f64]) {
        for (j, o) in out.iter_mut().enumerate() {
            *o = self.column_dot(j, y);
        }
    }
}
