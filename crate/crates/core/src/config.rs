//! Solver configuration and run reports.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;

/// Golden ratio `(1 + √5)/2`, the exclusive upper bound for the dual step
/// scale `τ`.
pub const TAU_UPPER_BOUND: f64 = 1.618033988749895;

/// Which spectral penalty the solver applies in its Z-update.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regularizer {
    Tl1,
    Nuclear,
}

impl Regularizer {
    pub fn name(&self) -> &'static str {
        match self {
            Regularizer::Tl1 => "tl1",
            Regularizer::Nuclear => "nuclear",
        }
    }
}

impl std::str::FromStr for Regularizer {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "tl1" => Ok(Regularizer::Tl1),
            "nuclear" => Ok(Regularizer::Nuclear),
            other => Err(Error::InvalidInput(format!(
                "unknown regularizer '{other}' (expected tl1 or nuclear)"
            ))),
        }
    }
}

impl std::fmt::Display for Regularizer {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Validated solver parameters.
///
/// `lambda` weighs the spectral penalty against the data fit, `a` is the
/// transformed-L1 internal parameter, `zeta` bounds the estimate entrywise,
/// `rho` is the ADMM step size, and `tau ∈ (0, (1+√5)/2)` scales the dual
/// ascent. Iteration stops when the relative change of the primal iterate
/// drops below `tol` or after `max_iters` sweeps.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolverConfig {
    pub lambda: f64,
    pub a: f64,
    pub zeta: f64,
    pub rho: f64,
    pub tau: f64,
    pub max_iters: usize,
    pub tol: f64,
    pub regularizer: Regularizer,
}

impl SolverConfig {
    pub const DEFAULT_RHO: f64 = 0.1;
    pub const DEFAULT_TAU: f64 = 1.618;
    pub const DEFAULT_MAX_ITERS: usize = 500;
    pub const DEFAULT_TOL: f64 = 1e-5;

    /// Builds a config with the default `rho`, `tau`, `max_iters`, and `tol`.
    pub fn new(regularizer: Regularizer, lambda: f64, a: f64, zeta: f64) -> Result<Self> {
        Self {
            lambda,
            a,
            zeta,
            rho: Self::DEFAULT_RHO,
            tau: Self::DEFAULT_TAU,
            max_iters: Self::DEFAULT_MAX_ITERS,
            tol: Self::DEFAULT_TOL,
            regularizer,
        }
        .validated()
    }

    /// Checks every positivity/range constraint; returns the config itself.
    pub fn validated(self) -> Result<Self> {
        fn positive(name: &str, v: f64) -> Result<()> {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::InvalidInput(format!(
                    "{name} must be a positive finite real, got {v}"
                )))
            }
        }
        positive("lambda", self.lambda)?;
        positive("a", self.a)?;
        positive("zeta", self.zeta)?;
        positive("rho", self.rho)?;
        positive("tol", self.tol)?;
        if !(self.tau > 0.0 && self.tau < TAU_UPPER_BOUND) {
            return Err(Error::InvalidInput(format!(
                "tau must lie in (0, {TAU_UPPER_BOUND}), got {}",
                self.tau
            )));
        }
        if self.max_iters == 0 {
            return Err(Error::InvalidInput("max_iters must be positive".into()));
        }
        Ok(self)
    }

    pub fn with_lambda(mut self, lambda: f64) -> Self {
        self.lambda = lambda;
        self
    }

    pub fn with_a(mut self, a: f64) -> Self {
        self.a = a;
        self
    }

    pub fn with_regularizer(mut self, regularizer: Regularizer) -> Self {
        self.regularizer = regularizer;
        self
    }
}

/// Outcome of one solver run.
///
/// `estimate` is the auxiliary iterate Z at termination projected onto the
/// entrywise box `[−ζ, ζ]`; it is the prediction matrix used for error
/// metrics. The raw final iterates are exposed alongside for diagnostics.
#[derive(Debug, Clone, Serialize)]
pub struct SolveReport {
    #[serde(skip)]
    pub estimate: DenseMatrix,
    /// Final Z iterate before the output projection.
    #[serde(skip)]
    pub final_z: DenseMatrix,
    /// Final A iterate (always inside the box by construction).
    #[serde(skip)]
    pub final_a: DenseMatrix,
    pub iterations: usize,
    /// `‖A^k − Z^k‖_F` after each iteration.
    pub primal_residuals: Vec<f64>,
    /// Penalized objective evaluated at Z after each iteration.
    pub objective_trace: Vec<f64>,
    pub converged: bool,
    pub estimated_rank: usize,
    pub elapsed_seconds: f64,
}
