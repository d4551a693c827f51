//! Dense real matrices with thin SVD access.
//!
//! Everything downstream (ground truths, observation masks, solver iterates,
//! estimates) lives in [`DenseMatrix`]: a validated, immutable wrapper around
//! a row-major `f64` array. Construction rejects NaN/infinity, so every
//! operation in the crate may assume finite entries.

use ndarray::{Array1, Array2};
use ndarray_linalg::{JobSvd, SVDDC};

use crate::error::{Error, Result};

/// Immutable dense `m1 × m2` matrix of finite reals.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    data: Array2<f64>,
}

/// Thin singular value decomposition `M = U · diag(s) · Vᵀ`.
///
/// `U` is `m1 × k`, `V` is `m2 × k`, and `s` holds the `k = min(m1, m2)`
/// singular values in decreasing order.
#[derive(Debug, Clone)]
pub struct ThinSvd {
    pub u: DenseMatrix,
    pub singular_values: Vec<f64>,
    pub v: DenseMatrix,
}

impl DenseMatrix {
    /// Builds a matrix from row-major entries, validating shape and finiteness.
    pub fn new(rows: usize, cols: usize, entries: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidInput(format!(
                "matrix dimensions must be positive, got {rows}x{cols}"
            )));
        }
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "expected {} entries for a {rows}x{cols} matrix, got {}",
                rows * cols,
                entries.len()
            )));
        }
        if !entries.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite("matrix entries".into()));
        }
        let data = Array2::from_shape_vec((rows, cols), entries)
            .expect("shape already validated");
        Ok(Self { data })
    }

    /// Wraps an existing array, validating finiteness.
    pub fn from_array(data: Array2<f64>) -> Result<Self> {
        if data.nrows() == 0 || data.ncols() == 0 {
            return Err(Error::InvalidInput(
                "matrix dimensions must be positive".into(),
            ));
        }
        if !data.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite("matrix entries".into()));
        }
        Ok(Self { data })
    }

    /// Wraps an array whose entries the caller has already proven finite.
    pub(crate) fn from_array_unchecked(data: Array2<f64>) -> Self {
        debug_assert!(data.iter().all(|v| v.is_finite()));
        Self { data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            data: Array2::zeros((rows, cols)),
        }
    }

    pub fn rows(&self) -> usize {
        self.data.nrows()
    }

    pub fn cols(&self) -> usize {
        self.data.ncols()
    }

    /// `min(m1, m2)`, the number of singular values.
    pub fn min_dim(&self) -> usize {
        self.rows().min(self.cols())
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[(row, col)]
    }

    pub fn as_array(&self) -> &Array2<f64> {
        &self.data
    }

    pub fn into_array(self) -> Array2<f64> {
        self.data
    }

    /// Frobenius norm `sqrt(Σ a_kl²)`.
    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Entrywise max-absolute norm `max |a_kl|`.
    pub fn inf_norm(&self) -> f64 {
        self.data.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    /// Frobenius norm of `self − other`.
    pub fn frobenius_distance(&self, other: &DenseMatrix) -> Result<f64> {
        if self.data.dim() != other.data.dim() {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} vs {}x{}",
                self.rows(),
                self.cols(),
                other.rows(),
                other.cols()
            )));
        }
        let mut acc = 0.0;
        for (a, b) in self.data.iter().zip(other.data.iter()) {
            let d = a - b;
            acc += d * d;
        }
        Ok(acc.sqrt())
    }

    /// Thin (economy) SVD with singular values in decreasing order.
    pub fn svd(&self) -> Result<ThinSvd> {
        let (u, s, vt) = self.data.svddc(JobSvd::Some)?;
        let u = u.ok_or_else(|| {
            Error::Linalg(ndarray_linalg::error::LinalgError::MemoryNotCont)
        })?;
        let vt = vt.ok_or_else(|| {
            Error::Linalg(ndarray_linalg::error::LinalgError::MemoryNotCont)
        })?;
        if !s.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite("singular values".into()));
        }
        Ok(ThinSvd {
            u: DenseMatrix::from_array_unchecked(u),
            singular_values: s.to_vec(),
            v: DenseMatrix::from_array_unchecked(vt.t().to_owned()),
        })
    }
}

impl ThinSvd {
    /// Rebuilds `U · diag(f(s)) · Vᵀ` with the given singular values, which
    /// must have the same length as the originals.
    pub fn reconstruct_with(&self, singular_values: &[f64]) -> Result<DenseMatrix> {
        if singular_values.len() != self.singular_values.len() {
            return Err(Error::DimensionMismatch(format!(
                "expected {} singular values, got {}",
                self.singular_values.len(),
                singular_values.len()
            )));
        }
        let s = Array1::from_iter(singular_values.iter().copied());
        // U · diag(s): scale columns of U, then multiply by Vᵀ.
        let mut scaled = self.u.as_array().to_owned();
        for (mut col, &sv) in scaled.columns_mut().into_iter().zip(s.iter()) {
            col.mapv_inplace(|x| x * sv);
        }
        let out = scaled.dot(&self.v.as_array().t());
        DenseMatrix::from_array(out)
    }

    /// Rebuilds the original matrix `U · diag(s) · Vᵀ`.
    pub fn reconstruct(&self) -> Result<DenseMatrix> {
        self.reconstruct_with(&self.singular_values.clone())
    }
}

/// Projects every entry onto `[−ζ, ζ]`.
pub fn clamp_entrywise(m: &DenseMatrix, zeta: f64) -> Result<DenseMatrix> {
    if !(zeta > 0.0 && zeta.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "zeta must be a positive finite real, got {zeta}"
        )));
    }
    let clamped = m.as_array().mapv(|v| v.clamp(-zeta, zeta));
    Ok(DenseMatrix::from_array_unchecked(clamped))
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    fn random_matrix(rows: usize, cols: usize, seed: u64) -> DenseMatrix {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let entries: Vec<f64> = (0..rows * cols)
            .map(|_| rng.random::<f64>() * 2.0 - 1.0)
            .collect();
        DenseMatrix::new(rows, cols, entries).unwrap()
    }

    #[test]
    fn construction_rejects_bad_shapes_and_nonfinite() {
        assert!(DenseMatrix::new(0, 3, vec![]).is_err());
        assert!(DenseMatrix::new(2, 2, vec![1.0; 3]).is_err());
        assert!(DenseMatrix::new(1, 2, vec![1.0, f64::NAN]).is_err());
        assert!(DenseMatrix::new(1, 2, vec![1.0, f64::INFINITY]).is_err());
    }

    #[test]
    fn svd_of_diagonal_matrix() {
        let m = DenseMatrix::from_array(array![[3.0, 0.0], [0.0, 1.0]]).unwrap();
        let svd = m.svd().unwrap();
        assert_eq!(svd.singular_values.len(), 2);
        assert!((svd.singular_values[0] - 3.0).abs() < 1e-12);
        assert!((svd.singular_values[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn svd_of_zero_matrix() {
        let m = DenseMatrix::zeros(4, 3);
        let svd = m.svd().unwrap();
        assert_eq!(svd.singular_values, vec![0.0, 0.0, 0.0]);
    }

    #[test]
    fn svd_reconstruction_and_orthonormality() {
        for seed in 0..5u64 {
            let m = random_matrix(6, 5, seed);
            let svd = m.svd().unwrap();
            // Round trip.
            let back = svd.reconstruct().unwrap();
            let rel = back.frobenius_distance(&m).unwrap() / m.frobenius_norm();
            assert!(rel <= 1e-8, "relative reconstruction error {rel}");
            // Decreasing, non-negative singular values.
            for w in svd.singular_values.windows(2) {
                assert!(w[0] >= w[1]);
            }
            assert!(svd.singular_values.iter().all(|&s| s >= 0.0));
            // Orthonormal columns.
            for (q, k) in [(&svd.u, 5usize), (&svd.v, 5usize)] {
                let gram = q.as_array().t().dot(q.as_array());
                for i in 0..k {
                    for j in 0..k {
                        let expect = if i == j { 1.0 } else { 0.0 };
                        assert!(
                            (gram[(i, j)] - expect).abs() <= 1e-8,
                            "gram[{i},{j}] = {}",
                            gram[(i, j)]
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn clamp_matches_scalar_oracle() {
        let m = DenseMatrix::new(1, 3, vec![-7.0, 0.2, 7.0]).unwrap();
        let c = clamp_entrywise(&m, 5.0).unwrap();
        assert_eq!(c.as_array().as_slice().unwrap(), &[-5.0, 0.2, 5.0]);

        // Identity when already inside the box.
        let inside = DenseMatrix::new(1, 3, vec![-0.5, 0.2, 0.9]).unwrap();
        assert_eq!(clamp_entrywise(&inside, 1.0).unwrap(), inside);

        // Componentwise against the scalar clamp.
        let m = random_matrix(7, 4, 42);
        let c = clamp_entrywise(&m, 0.3).unwrap();
        for (a, b) in m.as_array().iter().zip(c.as_array().iter()) {
            assert_eq!(*b, a.clamp(-0.3, 0.3));
        }
        assert!(c.inf_norm() <= 0.3);
    }

    #[test]
    fn clamp_is_idempotent() {
        let m = random_matrix(9, 6, 7);
        let once = clamp_entrywise(&m, 0.25).unwrap();
        let twice = clamp_entrywise(&once, 0.25).unwrap();
        assert_eq!(once, twice);
    }

    #[test]
    fn clamp_rejects_nonpositive_zeta() {
        let m = DenseMatrix::zeros(2, 2);
        assert!(clamp_entrywise(&m, 0.0).is_err());
        assert!(clamp_entrywise(&m, -1.0).is_err());
    }
}
