//! Low-rank matrix completion from noisy partial observations.
//!
//! The estimator minimizes a least-squares data fit over the observed
//! entries plus a spectral penalty, subject to an entrywise bound:
//!
//! ```text
//! min_{‖A‖_∞ ≤ ζ}  (1/n) Σ_i (Y_i − A(k_i, l_i))² + λ R(A)
//! ```
//!
//! Two penalties `R` are supported. The transformed-L1 penalty
//! `TL1_a(A) = Σ_j (a+1)σ_j / (a+σ_j)` interpolates between the rank
//! function (`a → 0`) and the nuclear norm (`a → ∞`) through its internal
//! parameter `a`. The nuclear norm `Σ_j σ_j` serves as the convex baseline.
//! Both are solved by the same ADMM splitting ([`admm::solve`]); they differ
//! only in the singular-value proximal map applied in the Z-update.
//!
//! The crate also ships the synthetic trace-regression benchmark generators
//! ([`synthetic`]), grid-search tuning and campaign orchestration
//! ([`evaluation`]), and file I/O for matrices, observation sets, and the
//! MovieLens/Coat rating datasets ([`io`]).
//!
//! With the default `parallel` feature, grid cells and benchmark trials fan
//! out across threads via rayon; results are merged in canonical order, so
//! outputs are identical to a sequential run.

pub mod admm;
pub mod config;
pub mod error;
pub mod evaluation;
pub mod io;
pub mod matrix;
pub mod observations;
pub mod parallel;
pub mod regularizer;
pub mod synthetic;

pub use config::{Regularizer, SolveReport, SolverConfig};
pub use error::{Error, Result};
pub use matrix::DenseMatrix;
pub use observations::{ObservationSet, SamplingDistribution};
