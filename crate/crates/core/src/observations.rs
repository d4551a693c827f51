//! Observed entries of a partially sampled matrix.
//!
//! An [`ObservationSet`] holds the `n` sampled `(row, col, value)` triples of
//! the trace-regression model together with the aggregate binary mask
//! `T = Σ T_i` and the mask-filled value matrix (zeros at unobserved cells),
//! both precomputed because the solver consumes them every iteration.

use std::collections::HashSet;

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;

/// A single observed entry `(row, col, value)`.
pub type Sample = (usize, usize, f64);

/// The `n` sampled index/value pairs of one problem instance.
#[derive(Debug, Clone)]
pub struct ObservationSet {
    rows: usize,
    cols: usize,
    samples: Vec<Sample>,
    mask: DenseMatrix,
    filled: DenseMatrix,
}

impl ObservationSet {
    /// Validates bounds, finiteness, and distinctness (sampling is without
    /// replacement) and precomputes the mask and mask-filled matrices.
    pub fn new(rows: usize, cols: usize, samples: Vec<Sample>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidInput(
                "observation grid dimensions must be positive".into(),
            ));
        }
        if samples.is_empty() {
            return Err(Error::InvalidInput(
                "observation set must contain at least one sample".into(),
            ));
        }
        if samples.len() > rows * cols {
            return Err(Error::InvalidInput(format!(
                "{} samples exceed the {}x{} grid",
                samples.len(),
                rows,
                cols
            )));
        }
        let mut seen = HashSet::with_capacity(samples.len());
        let mut mask = Array2::<f64>::zeros((rows, cols));
        let mut filled = Array2::<f64>::zeros((rows, cols));
        for &(r, c, v) in &samples {
            if r >= rows || c >= cols {
                return Err(Error::IndexOutOfBounds {
                    row: r,
                    col: c,
                    rows,
                    cols,
                });
            }
            if !v.is_finite() {
                return Err(Error::NonFinite(format!("observation at ({r}, {c})")));
            }
            if !seen.insert((r, c)) {
                return Err(Error::DuplicateIndex { row: r, col: c });
            }
            mask[(r, c)] = 1.0;
            filled[(r, c)] = v;
        }
        Ok(Self {
            rows,
            cols,
            samples,
            mask: DenseMatrix::from_array_unchecked(mask),
            filled: DenseMatrix::from_array_unchecked(filled),
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Number of observed entries `n`.
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    /// Binary mask `T` with 1 at observed cells.
    pub fn mask(&self) -> &DenseMatrix {
        &self.mask
    }

    /// Observed values at their cells, zeros elsewhere (`T ∘ Y`).
    pub fn filled(&self) -> &DenseMatrix {
        &self.filled
    }

    /// `‖Y‖_F = sqrt(Σ_i Y_i²)` over the observed values; used to scale the
    /// regularization-weight grid.
    pub fn value_frobenius_norm(&self) -> f64 {
        self.samples
            .iter()
            .map(|&(_, _, v)| v * v)
            .sum::<f64>()
            .sqrt()
    }

    /// Mean squared misfit `(1/n) Σ_i (Y_i − A(k_i, l_i))²` of a candidate.
    pub fn mean_squared_misfit(&self, candidate: &DenseMatrix) -> Result<f64> {
        if candidate.rows() != self.rows || candidate.cols() != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "candidate {}x{} vs observation grid {}x{}",
                candidate.rows(),
                candidate.cols(),
                self.rows,
                self.cols
            )));
        }
        let n = self.samples.len() as f64;
        let sum: f64 = self
            .samples
            .iter()
            .map(|&(r, c, v)| {
                let e = v - candidate.get(r, c);
                e * e
            })
            .sum();
        Ok(sum / n)
    }
}

/// Product sampling distribution `π_kl = p_k · p_l` given by row and column
/// marginals.
#[derive(Debug, Clone)]
pub struct SamplingDistribution {
    row_probs: Vec<f64>,
    col_probs: Vec<f64>,
}

impl SamplingDistribution {
    /// Validates non-negativity and normalization (each marginal sums to 1
    /// within 1e-12).
    pub fn new(row_probs: Vec<f64>, col_probs: Vec<f64>) -> Result<Self> {
        for (name, probs) in [("row", &row_probs), ("column", &col_probs)] {
            if probs.is_empty() {
                return Err(Error::InvalidInput(format!(
                    "{name} marginals must be non-empty"
                )));
            }
            if probs.iter().any(|p| !p.is_finite() || *p < 0.0) {
                return Err(Error::InvalidInput(format!(
                    "{name} marginals must be finite and non-negative"
                )));
            }
            let sum: f64 = probs.iter().sum();
            if (sum - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidInput(format!(
                    "{name} marginals sum to {sum}, expected 1"
                )));
            }
        }
        Ok(Self {
            row_probs,
            col_probs,
        })
    }

    pub fn row_probs(&self) -> &[f64] {
        &self.row_probs
    }

    pub fn col_probs(&self) -> &[f64] {
        &self.col_probs
    }

    /// Joint cell probability `π_kl = p_k · p_l`.
    pub fn joint(&self, row: usize, col: usize) -> f64 {
        self.row_probs[row] * self.col_probs[col]
    }
}
