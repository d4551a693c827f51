//! Spectral penalties and their proximal operators.
//!
//! The transformed-L1 penalty on a matrix applies the scalar function
//! `σ ↦ (a+1)σ/(a+σ)` to each singular value and sums. As `a → 0` the sum
//! approaches the rank; as `a → ∞` it approaches the nuclear norm. Its
//! proximal operator therefore thresholds singular values more aggressively
//! than plain soft-thresholding at small `a` and coincides with it in the
//! large-`a` limit.
//!
//! The scalar prox solves
//!
//! ```text
//! min_z  μ (a+1)|z|/(a+|z|) + (z − x)²/2
//! ```
//!
//! Stationarity for `z > 0` is a cubic whose largest real root has the
//! trigonometric closed form used in [`tl1_scalar_prox`]; the minimizer is
//! either that root or exactly 0, decided by comparing objective values
//! (ties go to 0). The [`oracle`] submodule provides an independent grid
//! minimizer of the same objective for verification.

use crate::config::Regularizer;
use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;

/// Parameters of the scalar proximal problem: the prox weight `μ` (equal to
/// `λ/ρ` inside the solver) and the transformed-L1 parameter `a`.
#[derive(Debug, Clone, Copy)]
pub struct ProxParams {
    pub mu: f64,
    pub a: f64,
}

impl ProxParams {
    pub fn new(mu: f64, a: f64) -> Result<Self> {
        if !(mu.is_finite() && mu > 0.0) {
            return Err(Error::InvalidInput(format!(
                "prox weight mu must be positive and finite, got {mu}"
            )));
        }
        if !(a.is_finite() && a > 0.0) {
            return Err(Error::InvalidInput(format!(
                "parameter a must be positive and finite, got {a}"
            )));
        }
        Ok(Self { mu, a })
    }
}

/// Transformed-L1 of a spectrum: `Σ_j (a+1)σ_j/(a+σ_j)`.
pub fn tl1_of_spectrum(singular_values: &[f64], a: f64) -> f64 {
    singular_values
        .iter()
        .map(|&s| (a + 1.0) * s / (a + s))
        .sum()
}

/// Penalty value of a spectrum under the given regularizer (`a` is ignored
/// in nuclear mode).
pub fn penalty_of_spectrum(regularizer: Regularizer, singular_values: &[f64], a: f64) -> f64 {
    match regularizer {
        Regularizer::Tl1 => tl1_of_spectrum(singular_values, a),
        Regularizer::Nuclear => singular_values.iter().sum(),
    }
}

/// Transformed-L1 penalty of a matrix.
///
/// The value lies in `[0, min(m1,m2)·(a+1))`; it equals the rank in the
/// `a → 0` limit and the nuclear norm in the `a → ∞` limit.
pub fn tl1_value(m: &DenseMatrix, a: f64) -> Result<f64> {
    if !(a.is_finite() && a > 0.0) {
        return Err(Error::InvalidInput(format!(
            "parameter a must be positive and finite, got {a}"
        )));
    }
    let svd = m.svd()?;
    Ok(tl1_of_spectrum(&svd.singular_values, a))
}

/// Scalar transformed-L1 proximal operator.
///
/// Returns a global minimizer of `μ(a+1)|z|/(a+|z|) + (z−x)²/2`. The
/// magnitude never exceeds `|x|`, the sign matches `x` (or the result is 0),
/// and the map is odd.
pub fn tl1_scalar_prox(x: f64, params: ProxParams) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    let ProxParams { mu, a } = params;
    let x_abs = x.abs();
    let g = |z: f64| mu * (a + 1.0) * z / (a + z) + 0.5 * (z - x_abs) * (z - x_abs);

    // Largest real root of the stationarity cubic, in trigonometric form.
    // The arccos argument can only fall below -1 (the numerator is positive);
    // values within 1e-12 outside are rounding noise and get clipped, anything
    // further out means no interior stationary point exists.
    let arg = 1.0 - 27.0 * mu * a * (1.0 + a) / (2.0 * (a + x_abs).powi(3));
    let candidate = if arg < -1.0 - 1e-12 {
        0.0
    } else {
        let phi = arg.clamp(-1.0, 1.0).acos();
        let root = (2.0 / 3.0) * (a + x_abs) * (phi / 3.0).cos() - 2.0 * a / 3.0 + x_abs / 3.0;
        root.clamp(0.0, x_abs)
    };

    // Two-candidate selection with ties toward 0.
    let z = if g(candidate) < g(0.0) { candidate } else { 0.0 };
    x.signum() * z
}

/// Soft threshold `sign(x)·max(|x| − μ, 0)`, the scalar proximal operator of
/// the absolute value (and of the nuclear norm on singular values).
pub fn nuclear_scalar_prox(x: f64, mu: f64) -> f64 {
    x.signum() * (x.abs() - mu).max(0.0)
}

/// Applies the transformed-L1 scalar prox to every singular value:
/// `U diag(prox(σ_j)) Vᵀ`.
pub fn tl1_matrix_prox(m: &DenseMatrix, params: ProxParams) -> Result<DenseMatrix> {
    let svd = m.svd()?;
    let shrunk: Vec<f64> = svd
        .singular_values
        .iter()
        .map(|&s| tl1_scalar_prox(s, params))
        .collect();
    svd.reconstruct_with(&shrunk)
}

/// Singular value thresholding: soft-thresholds every singular value at `μ`.
pub fn nuclear_matrix_prox(m: &DenseMatrix, mu: f64) -> Result<DenseMatrix> {
    if !(mu.is_finite() && mu > 0.0) {
        return Err(Error::InvalidInput(format!(
            "threshold mu must be positive and finite, got {mu}"
        )));
    }
    let svd = m.svd()?;
    let shrunk: Vec<f64> = svd
        .singular_values
        .iter()
        .map(|&s| nuclear_scalar_prox(s, mu))
        .collect();
    svd.reconstruct_with(&shrunk)
}

/// Minimum separation (and minimum magnitude) of singular values below which
/// the transformed-L1 gradient is treated as undefined.
pub const GRADIENT_SMOOTHNESS_GAP: f64 = 1e-8;

/// Gradient of the transformed-L1 penalty at a smooth point:
/// `Σ_j a(1+a)/(a+σ_j)² · u_j v_jᵀ`.
///
/// Defined only where all singular values are strictly positive and
/// pairwise distinct; repeated or near-zero singular values (gap below
/// [`GRADIENT_SMOOTHNESS_GAP`]) yield a [`Error::NonSmoothPoint`].
pub fn tl1_gradient(m: &DenseMatrix, a: f64) -> Result<DenseMatrix> {
    if !(a.is_finite() && a > 0.0) {
        return Err(Error::InvalidInput(format!(
            "parameter a must be positive and finite, got {a}"
        )));
    }
    let svd = m.svd()?;
    let sigma = &svd.singular_values;
    if let Some(&smallest) = sigma.last() {
        if smallest < GRADIENT_SMOOTHNESS_GAP {
            return Err(Error::NonSmoothPoint(format!(
                "singular value {smallest} is numerically zero"
            )));
        }
    }
    for w in sigma.windows(2) {
        if w[0] - w[1] < GRADIENT_SMOOTHNESS_GAP {
            return Err(Error::NonSmoothPoint(format!(
                "singular values {} and {} are not separated",
                w[0], w[1]
            )));
        }
    }
    let coeffs: Vec<f64> = sigma
        .iter()
        .map(|&s| a * (1.0 + a) / ((a + s) * (a + s)))
        .collect();
    svd.reconstruct_with(&coeffs)
}

/// Independent reference minimizer for the scalar prox objective.
///
/// Used by the verification suites and the `prox-check` command; it knows
/// nothing about the closed form above and simply scans a uniform grid.
pub mod oracle {
    /// The scalar prox objective `g(z) = μ(a+1)|z|/(a+|z|) + (z−x)²/2`.
    pub fn scalar_objective(z: f64, x: f64, mu: f64, a: f64) -> f64 {
        let za = z.abs();
        mu * (a + 1.0) * za / (a + za) + 0.5 * (z - x) * (z - x)
    }

    /// Minimizes `g` over a uniform grid of the given resolution on
    /// `[−|x|, |x|]` (the interval always contains a global minimizer).
    /// Returns `(argmin, min)`.
    pub fn grid_minimum(x: f64, mu: f64, a: f64, resolution: f64) -> (f64, f64) {
        let x_abs = x.abs();
        let mut best_z = 0.0;
        let mut best_g = scalar_objective(0.0, x, mu, a);
        if x_abs == 0.0 {
            return (best_z, best_g);
        }
        let steps = (2.0 * x_abs / resolution).round() as u64;
        for k in 0..=steps {
            let z = -x_abs + k as f64 * resolution;
            let g = scalar_objective(z, x, mu, a);
            if g < best_g {
                best_g = g;
                best_z = z;
            }
        }
        // Make sure the right endpoint itself is probed.
        let g_end = scalar_objective(x_abs, x, mu, a);
        if g_end < best_g {
            best_g = g_end;
            best_z = x_abs;
        }
        (best_z, best_g)
    }
}
