//! Factorization models and diagonal rescaling.
//!
//! A [`FactorModel`] is the pair `(W, H)` of a rank-`k` non-negative
//! factorization `X ~ W H`. Any positive diagonal `D` yields the equivalent
//! pair `(W D)(D^-1 H)` with an unchanged residual, so models carry a
//! [`ScalingScheme`] tag recording which convention their `W` columns follow.

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;

/// Column convention applied to the score matrix `W`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScalingScheme {
    /// Each `W` column has maximum entry 1, so scores read as fractions of
    /// the archetype.
    MaxWeight,
    /// Each `W` column has unit Euclidean norm.
    SumOfSquares,
    /// Whatever the solver produced; no convention enforced.
    None,
}

/// A non-negative factorization: scores `W` (n x k), loadings `H` (k x p).
#[derive(Debug, Clone, PartialEq)]
pub struct FactorModel {
    w: DenseMatrix,
    h: DenseMatrix,
    scaling: ScalingScheme,
}

impl FactorModel {
    /// Pairs scores with loadings, checking the shared rank dimension.
    /// The scaling tag starts as [`ScalingScheme::None`]; use [`Self::rescale`]
    /// to establish a convention.
    pub fn new(w: DenseMatrix, h: DenseMatrix) -> Result<Self> {
        if w.cols() != h.rows() {
            return Err(Error::DimensionMismatch(format!(
                "W has {} columns but H has {} rows",
                w.cols(),
                h.rows()
            )));
        }
        Ok(Self {
            w,
            h,
            scaling: ScalingScheme::None,
        })
    }

    pub(crate) fn with_scaling(w: DenseMatrix, h: DenseMatrix, scaling: ScalingScheme) -> Self {
        debug_assert_eq!(w.cols(), h.rows());
        Self { w, h, scaling }
    }

    pub fn w(&self) -> &DenseMatrix {
        &self.w
    }

    pub fn h(&self) -> &DenseMatrix {
        &self.h
    }

    /// Number of archetypes `k`.
    pub fn rank(&self) -> usize {
        self.w.cols()
    }

    pub fn scaling(&self) -> ScalingScheme {
        self.scaling
    }

    /// Replaces the score matrix with one of identical shape. The scaling tag
    /// resets to `None`: the caller may have broken the column convention.
    pub fn replace_w(&mut self, w: DenseMatrix) -> Result<()> {
        if w.rows() != self.w.rows() || w.cols() != self.w.cols() {
            return Err(Error::DimensionMismatch(format!(
                "replacement W is {}x{}, expected {}x{}",
                w.rows(),
                w.cols(),
                self.w.rows(),
                self.w.cols()
            )));
        }
        self.w = w;
        self.scaling = ScalingScheme::None;
        Ok(())
    }

    /// The model's approximation `W H` of the data.
    pub fn reconstruct(&self) -> DenseMatrix {
        let product = self.w.as_array().dot(self.h.as_array());
        // Product of non-negative factors; clamp stray -0.0 from summation.
        DenseMatrix::from_array_unchecked(product.mapv(|v| v.max(0.0)))
    }

    /// Frobenius norm of the residual `X - W H`.
    pub fn frobenius_error(&self, x: &DenseMatrix) -> Result<f64> {
        if x.rows() != self.w.rows() || x.cols() != self.h.cols() {
            return Err(Error::DimensionMismatch(format!(
                "data is {}x{} but model reconstructs {}x{}",
                x.rows(),
                x.cols(),
                self.w.rows(),
                self.h.cols()
            )));
        }
        let approx = self.w.as_array().dot(self.h.as_array());
        Ok((x.as_array() - &approx).iter().map(|v| v * v).sum::<f64>().sqrt())
    }

    /// Applies the diagonal rescaling `(W D)(D^-1 H)` that makes the `W`
    /// columns satisfy `scheme`. Identically zero columns are left untouched
    /// (their diagonal entry is 1): a dead archetype stays dead. The
    /// reconstruction is unchanged up to floating-point rounding.
    pub fn rescale(&self, scheme: ScalingScheme) -> FactorModel {
        let mut w: Array2<f64> = self.w.as_array().clone();
        let mut h: Array2<f64> = self.h.as_array().clone();
        for u in 0..w.ncols() {
            let d = match scheme {
                ScalingScheme::MaxWeight => self.w.column_max(u),
                ScalingScheme::SumOfSquares => self.w.column_norm(u),
                ScalingScheme::None => 1.0,
            };
            if d <= 0.0 {
                continue;
            }
            w.column_mut(u).mapv_inplace(|v| v / d);
            h.row_mut(u).mapv_inplace(|v| v * d);
        }
        FactorModel::with_scaling(
            DenseMatrix::from_array_unchecked(w),
            DenseMatrix::from_array_unchecked(h),
            scheme,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent triple-loop product, kept free of ndarray's `dot`.
    fn matmul_oracle(a: &DenseMatrix, b: &DenseMatrix) -> Vec<Vec<f64>> {
        let mut out = vec![vec![0.0; b.cols()]; a.rows()];
        for i in 0..a.rows() {
            for j in 0..b.cols() {
                for l in 0..a.cols() {
                    out[i][j] += a.get(i, l) * b.get(l, j);
                }
            }
        }
        out
    }

    fn model(w: &[Vec<f64>], h: &[Vec<f64>]) -> FactorModel {
        FactorModel::new(
            DenseMatrix::from_rows(w).unwrap(),
            DenseMatrix::from_rows(h).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn reconstruct_scalar_product() {
        let m = model(&[vec![2.0]], &[vec![3.0]]);
        assert_eq!(m.reconstruct().get(0, 0), 6.0);
    }

    #[test]
    fn reconstruct_identity_case() {
        let m = model(
            &[vec![1.0, 0.0], vec![0.0, 1.0]],
            &[vec![1.0, 2.0], vec![3.0, 4.0]],
        );
        let r = m.reconstruct();
        assert_eq!(
            (r.get(0, 0), r.get(0, 1), r.get(1, 0), r.get(1, 1)),
            (1.0, 2.0, 3.0, 4.0)
        );
    }

    #[test]
    fn reconstruct_matches_triple_loop_oracle() {
        let m = model(&[vec![1.0, 1.0]], &[vec![1.0, 2.0], vec![3.0, 4.0]]);
        let r = m.reconstruct();
        assert_eq!((r.get(0, 0), r.get(0, 1)), (4.0, 6.0));
        let oracle = matmul_oracle(m.w(), m.h());
        for i in 0..r.rows() {
            for j in 0..r.cols() {
                assert!((r.get(i, j) - oracle[i][j]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn rank_mismatch_rejected() {
        let w = DenseMatrix::from_rows(&[vec![1.0, 2.0]]).unwrap();
        let h = DenseMatrix::from_rows(&[vec![1.0]]).unwrap();
        assert!(FactorModel::new(w, h).is_err());
    }

    #[test]
    fn frobenius_error_exact_fit_is_zero() {
        let m = model(
            &[vec![1.0, 0.5], vec![0.25, 2.0]],
            &[vec![1.0, 2.0, 0.5], vec![0.0, 1.0, 3.0]],
        );
        let x = m.reconstruct();
        assert_eq!(m.frobenius_error(&x).unwrap(), 0.0);
    }

    #[test]
    fn frobenius_error_unit_residual() {
        let m = model(&[vec![0.0]], &[vec![0.0]]);
        let x = DenseMatrix::from_rows(&[vec![1.0]]).unwrap();
        assert_eq!(m.frobenius_error(&x).unwrap(), 1.0);
    }

    #[test]
    fn frobenius_error_sum_of_squares() {
        // Residual against the zero model is sqrt(1 + 4 + 9 + 16) = sqrt(30).
        let m = model(&[vec![0.0], vec![0.0]], &[vec![0.0, 0.0]]);
        let x = DenseMatrix::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        let expected = 30.0f64.sqrt();
        assert!((m.frobenius_error(&x).unwrap() - expected).abs() < 1e-12);
        assert!((expected - 5.477226).abs() < 1e-6);
    }

    #[test]
    fn frobenius_error_dimension_mismatch() {
        let m = model(&[vec![1.0]], &[vec![1.0]]);
        let x = DenseMatrix::from_rows(&[vec![1.0, 2.0]]).unwrap();
        assert!(m.frobenius_error(&x).is_err());
    }

    #[test]
    fn rescale_max_weight_divides_by_column_max() {
        let m = model(&[vec![0.5], vec![2.0]], &[vec![1.0, 3.0]]);
        let s = m.rescale(ScalingScheme::MaxWeight);
        assert_eq!(s.w().get(0, 0), 0.25);
        assert_eq!(s.w().get(1, 0), 1.0);
        assert_eq!(s.h().get(0, 0), 2.0);
        assert_eq!(s.h().get(0, 1), 6.0);
        assert_eq!(s.scaling(), ScalingScheme::MaxWeight);
    }

    #[test]
    fn rescale_sum_of_squares_divides_by_column_norm() {
        let m = model(&[vec![3.0], vec![4.0]], &[vec![1.0]]);
        let s = m.rescale(ScalingScheme::SumOfSquares);
        assert!((s.w().get(0, 0) - 0.6).abs() < 1e-15);
        assert!((s.w().get(1, 0) - 0.8).abs() < 1e-15);
        assert!((s.h().get(0, 0) - 5.0).abs() < 1e-15);
    }

    #[test]
    fn rescale_is_idempotent() {
        let m = model(
            &[vec![0.5, 1.0], vec![2.0, 3.0]],
            &[vec![1.0, 2.0], vec![3.0, 4.0]],
        );
        for scheme in [ScalingScheme::MaxWeight, ScalingScheme::SumOfSquares] {
            let once = m.rescale(scheme);
            let twice = once.rescale(scheme);
            assert!(once.w().max_abs_diff(twice.w()).unwrap() < 1e-12);
            assert!(once.h().max_abs_diff(twice.h()).unwrap() < 1e-12);
        }
    }

    #[test]
    fn rescale_skips_zero_columns() {
        let m = model(
            &[vec![0.0, 1.0], vec![0.0, 2.0]],
            &[vec![1.0, 2.0], vec![3.0, 4.0]],
        );
        let s = m.rescale(ScalingScheme::MaxWeight);
        assert_eq!(s.w().get(0, 0), 0.0);
        assert_eq!(s.h().get(0, 0), 1.0); // untouched loading row
        assert_eq!(s.w().get(1, 1), 1.0);
    }

    #[test]
    fn rescale_preserves_reconstruction() {
        let m = model(
            &[vec![0.5, 1.5], vec![2.0, 0.1]],
            &[vec![1.0, 2.0, 3.0], vec![0.4, 0.5, 0.6]],
        );
        let base = m.reconstruct();
        for scheme in [ScalingScheme::MaxWeight, ScalingScheme::SumOfSquares] {
            let diff = m.rescale(scheme).reconstruct().max_abs_diff(&base).unwrap();
            assert!(diff <= 1e-10 * base.frobenius_norm());
        }
    }
}
