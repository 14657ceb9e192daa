//! Dense non-negative matrices.
//!
//! [`DenseMatrix`] is the carrier for every matrix in this crate: the data
//! `X` (samples x responses), the scores `W` (samples x archetypes) and the
//! loadings `H` (archetypes x responses). Construction validates the domain
//! invariants once — at least one row and column, every entry finite and
//! non-negative — so downstream code can rely on them without re-checking.

use ndarray::{Array2, ArrayView1, ArrayView2};

use crate::error::{Error, Result};

/// A dense matrix with finite, non-negative entries and row-major semantics.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix(Array2<f64>);

impl DenseMatrix {
    /// Wraps an `ndarray` array, validating non-emptiness, finiteness and
    /// non-negativity of every entry.
    pub fn from_array(values: Array2<f64>) -> Result<Self> {
        if values.nrows() == 0 || values.ncols() == 0 {
            return Err(Error::InvalidMatrix(format!(
                "matrix must have at least one row and one column, got {}x{}",
                values.nrows(),
                values.ncols()
            )));
        }
        for ((i, j), &v) in values.indexed_iter() {
            if !v.is_finite() {
                return Err(Error::InvalidMatrix(format!(
                    "non-finite entry {v} at row {i}, column {j}"
                )));
            }
            if v < 0.0 {
                return Err(Error::InvalidMatrix(format!(
                    "negative entry {v} at row {i}, column {j}"
                )));
            }
        }
        Ok(Self(values))
    }

    /// Builds a matrix from `rows * cols` values in row-major order.
    pub fn from_shape_vec(rows: usize, cols: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != rows * cols {
            return Err(Error::InvalidMatrix(format!(
                "expected {} values for a {rows}x{cols} matrix, got {}",
                rows * cols,
                values.len()
            )));
        }
        let array = Array2::from_shape_vec((rows, cols), values)
            .map_err(|e| Error::InvalidMatrix(e.to_string()))?;
        Self::from_array(array)
    }

    /// Builds a matrix from a slice of equally sized rows.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::InvalidMatrix("no rows".into()));
        }
        let cols = rows[0].len();
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::InvalidMatrix("ragged rows".into()));
        }
        let flat: Vec<f64> = rows.iter().flatten().copied().collect();
        Self::from_shape_vec(rows.len(), cols, flat)
    }

    /// Wraps values produced by code that preserves the invariants; checked
    /// only in debug builds.
    pub(crate) fn from_array_unchecked(values: Array2<f64>) -> Self {
        debug_assert!(values.nrows() >= 1 && values.ncols() >= 1);
        debug_assert!(values.iter().all(|v| v.is_finite() && *v >= 0.0));
        Self(values)
    }

    pub fn rows(&self) -> usize {
        self.0.nrows()
    }

    pub fn cols(&self) -> usize {
        self.0.ncols()
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.0[(row, col)]
    }

    pub fn view(&self) -> ArrayView2<'_, f64> {
        self.0.view()
    }

    pub fn as_array(&self) -> &Array2<f64> {
        &self.0
    }

    pub fn into_array(self) -> Array2<f64> {
        self.0
    }

    pub fn column(&self, col: usize) -> ArrayView1<'_, f64> {
        self.0.column(col)
    }

    /// Largest entry of a column; columns are non-empty so the maximum exists.
    pub fn column_max(&self, col: usize) -> f64 {
        self.0.column(col).iter().copied().fold(f64::MIN, f64::max)
    }

    /// Euclidean norm of a column.
    pub fn column_norm(&self, col: usize) -> f64 {
        self.0.column(col).iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Frobenius norm of the whole matrix.
    pub fn frobenius_norm(&self) -> f64 {
        self.0.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Entrywise maximum absolute difference, `None` when shapes differ.
    pub fn max_abs_diff(&self, other: &DenseMatrix) -> Option<f64> {
        if self.0.dim() != other.0.dim() {
            return None;
        }
        Some(
            self.0
                .iter()
                .zip(other.0.iter())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max),
        )
    }
}
