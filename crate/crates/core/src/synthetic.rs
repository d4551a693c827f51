//! Synthetic trace-regression instances.
//!
//! Ground truths are random rank-`r` products `A0 = U Vᵀ` with standard
//! normal factors. Observation cells are drawn without replacement from a
//! product distribution `π_kl = p_k p_l` whose marginals follow one of three
//! schemes:
//!
//! ```text
//! Scheme 1   p_k = 1/m                        (uniform)
//! Scheme 2   p_k = 2p0 | 4p0 | p0             (k ≤ m/10 | m/10 < k ≤ m/5 | rest)
//! Scheme 3   p_k = 3p0 | 9p0 | p0             (same pieces)
//! ```
//!
//! with `p0` set by normalization. Gaussian noise is calibrated so that
//! `10·log10(Σ_i ⟨T_i, A0⟩² / σ²)` equals the requested SNR in dB, using the
//! realized observed signal.
//!
//! All generators are pure functions of an explicit 64-bit seed; ground
//! truth, mask, and noise consume independent streams of the same seed, so
//! instances are reproducible regardless of scheduling.

use ndarray::Array2;
use ndarray_linalg::QR;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;
use crate::observations::{ObservationSet, SamplingDistribution};

const STREAM_TRUTH: u64 = 1;
const STREAM_MASK: u64 = 2;
const STREAM_NOISE: u64 = 3;

fn stream_rng(seed: u64, stream: u64) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Row/column marginal sampling scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Scheme {
    S1,
    S2,
    S3,
}

impl Scheme {
    /// Piece weights `(first tenth, second tenth, remainder)` in units of `p0`.
    fn piece_weights(&self) -> Option<(f64, f64)> {
        match self {
            Scheme::S1 => None,
            Scheme::S2 => Some((2.0, 4.0)),
            Scheme::S3 => Some((3.0, 9.0)),
        }
    }
}

impl std::str::FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "1" | "s1" => Ok(Scheme::S1),
            "2" | "s2" => Ok(Scheme::S2),
            "3" | "s3" => Ok(Scheme::S3),
            other => Err(Error::InvalidInput(format!(
                "unknown sampling scheme '{other}' (expected 1, 2, or 3)"
            ))),
        }
    }
}

impl std::fmt::Display for Scheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Scheme::S1 => f.write_str("S1"),
            Scheme::S2 => f.write_str("S2"),
            Scheme::S3 => f.write_str("S3"),
        }
    }
}

/// One synthetic benchmark scenario.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScenarioSpec {
    pub m1: usize,
    pub m2: usize,
    /// Target rank of the ground truth.
    pub r: usize,
    pub scheme: Scheme,
    /// Fraction of entries observed, `SR = n/(m1·m2)`, in `(0, 1]`.
    pub sampling_ratio: f64,
    /// Signal-to-noise ratio in dB; `None` means noiseless.
    pub snr_db: Option<f64>,
    pub seed: u64,
}

impl ScenarioSpec {
    pub fn validated(self) -> Result<Self> {
        if self.m1 == 0 || self.m2 == 0 {
            return Err(Error::InvalidInput("dimensions must be positive".into()));
        }
        if self.r == 0 || self.r > self.m1.min(self.m2) {
            return Err(Error::InvalidInput(format!(
                "rank {} outside [1, min(m1, m2) = {}]",
                self.r,
                self.m1.min(self.m2)
            )));
        }
        if !(self.sampling_ratio > 0.0 && self.sampling_ratio <= 1.0) {
            return Err(Error::InvalidInput(format!(
                "sampling ratio {} outside (0, 1]",
                self.sampling_ratio
            )));
        }
        if self.observation_count() == 0 {
            return Err(Error::InvalidInput(
                "sampling ratio implies zero observations".into(),
            ));
        }
        if self.scheme != Scheme::S1 && (self.m1 < 10 || self.m2 < 10) {
            return Err(Error::InvalidInput(
                "schemes 2 and 3 require dimensions of at least 10".into(),
            ));
        }
        if let Some(snr) = self.snr_db {
            if !snr.is_finite() {
                return Err(Error::InvalidInput("snr_db must be finite".into()));
            }
        }
        Ok(self)
    }

    /// Implied number of observations, `round(SR · m1 · m2)`.
    pub fn observation_count(&self) -> usize {
        (self.sampling_ratio * (self.m1 * self.m2) as f64).round() as usize
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        Self { seed, ..self.clone() }
    }

    /// Compact label used in result tables.
    pub fn label(&self) -> String {
        let noise = match self.snr_db {
            Some(db) => format!("snr{db}"),
            None => "noiseless".to_string(),
        };
        format!(
            "{}x{}_r{}_{}_sr{}_{}",
            self.m1, self.m2, self.r, self.scheme, self.sampling_ratio, noise
        )
    }
}

/// Marginal probabilities of one dimension under a scheme.
///
/// Piecewise schemes use breakpoints `floor(m/10)` and `floor(m/5)` and
/// require `m ≥ 10`. The output always sums to 1 within 1e-12.
pub fn scheme_marginals(m: usize, scheme: Scheme) -> Result<Vec<f64>> {
    if m == 0 {
        return Err(Error::InvalidInput("dimension must be positive".into()));
    }
    match scheme.piece_weights() {
        None => Ok(vec![1.0 / m as f64; m]),
        Some((w1, w2)) => {
            if m < 10 {
                return Err(Error::InvalidInput(format!(
                    "scheme {scheme} requires m >= 10, got {m}"
                )));
            }
            let b1 = m / 10;
            let b2 = m / 5;
            let shares = w1 * b1 as f64 + w2 * (b2 - b1) as f64 + (m - b2) as f64;
            let p0 = 1.0 / shares;
            let mut probs = Vec::with_capacity(m);
            for k in 0..m {
                let w = if k < b1 {
                    w1
                } else if k < b2 {
                    w2
                } else {
                    1.0
                };
                probs.push(w * p0);
            }
            Ok(probs)
        }
    }
}

/// Product sampling distribution for a scenario (rows and columns follow the
/// same scheme).
pub fn scenario_distribution(spec: &ScenarioSpec) -> Result<SamplingDistribution> {
    SamplingDistribution::new(
        scheme_marginals(spec.m1, spec.scheme)?,
        scheme_marginals(spec.m2, spec.scheme)?,
    )
}

/// Rank-`r` ground truth `A0 = U Vᵀ` from the given factors.
pub fn ground_truth_from_factors(u: &Array2<f64>, v: &Array2<f64>) -> Result<DenseMatrix> {
    if u.ncols() != v.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "factor ranks differ: {} vs {}",
            u.ncols(),
            v.ncols()
        )));
    }
    DenseMatrix::from_array(u.dot(&v.t()))
}

/// Samples `A0 = U Vᵀ` with i.i.d. standard normal factor entries.
pub fn generate_ground_truth(spec: &ScenarioSpec) -> Result<DenseMatrix> {
    let mut rng = stream_rng(spec.seed, STREAM_TRUTH);
    let normal = StandardNormal;
    let u = Array2::from_shape_fn((spec.m1, spec.r), |_| normal.sample(&mut rng));
    let v = Array2::from_shape_fn((spec.m2, spec.r), |_| normal.sample(&mut rng));
    ground_truth_from_factors(&u, &v)
}

/// Draws `n` distinct cells from `π_kl = p_k p_l` without replacement
/// (weighted reservoir, equivalent to sequential draws from the renormalized
/// residual distribution). The result is sorted row-major and is a pure
/// function of the scenario seed.
pub fn sample_mask(
    spec: &ScenarioSpec,
    dist: &SamplingDistribution,
) -> Result<Vec<(usize, usize)>> {
    if dist.row_probs().len() != spec.m1 || dist.col_probs().len() != spec.m2 {
        return Err(Error::DimensionMismatch(
            "sampling distribution does not match scenario dimensions".into(),
        ));
    }
    let n = spec.observation_count();
    let total = spec.m1 * spec.m2;
    if n > total {
        return Err(Error::InvalidInput(format!(
            "cannot draw {n} distinct cells from a {total}-cell grid"
        )));
    }
    let mut rng = stream_rng(spec.seed, STREAM_MASK);
    let m2 = spec.m2;
    let picked = rand::seq::index::sample_weighted(
        &mut rng,
        total,
        |flat| dist.joint(flat / m2, flat % m2),
        n,
    )
    .map_err(|e| Error::InvalidInput(format!("weighted sampling failed: {e}")))?;
    let mut indices: Vec<(usize, usize)> =
        picked.into_iter().map(|flat| (flat / m2, flat % m2)).collect();
    indices.sort_unstable();
    Ok(indices)
}

/// Observes `A0` at the given cells, adding Gaussian noise scaled so the
/// realized SNR matches `snr_db`; `None` keeps the values exact.
pub fn apply_noise(
    a0: &DenseMatrix,
    indices: &[(usize, usize)],
    snr_db: Option<f64>,
    seed: u64,
) -> Result<ObservationSet> {
    if indices.is_empty() {
        return Err(Error::InvalidInput("index list must be non-empty".into()));
    }
    let sigma = match snr_db {
        None => 0.0,
        Some(db) => {
            let signal_energy: f64 = indices
                .iter()
                .map(|&(r, c)| {
                    let v = a0.get(r, c);
                    v * v
                })
                .sum();
            if signal_energy == 0.0 {
                return Err(Error::Degenerate(
                    "all observed entries are zero; SNR-calibrated noise is undefined".into(),
                ));
            }
            (signal_energy / 10f64.powf(db / 10.0)).sqrt()
        }
    };
    let mut rng = stream_rng(seed, STREAM_NOISE);
    let normal = StandardNormal;
    let samples: Vec<(usize, usize, f64)> = indices
        .iter()
        .map(|&(r, c)| {
            let noise: f64 = if sigma > 0.0 {
                normal.sample(&mut rng)
            } else {
                0.0
            };
            (r, c, a0.get(r, c) + sigma * noise)
        })
        .collect();
    ObservationSet::new(a0.rows(), a0.cols(), samples)
}

/// Generates the full instance for a scenario: ground truth plus noisy
/// observations.
pub fn generate_instance(spec: &ScenarioSpec) -> Result<(DenseMatrix, ObservationSet)> {
    let spec = spec.clone().validated()?;
    let a0 = generate_ground_truth(&spec)?;
    let dist = scenario_distribution(&spec)?;
    let indices = sample_mask(&spec, &dist)?;
    let obs = apply_noise(&a0, &indices, spec.snr_db, spec.seed)?;
    Ok((a0, obs))
}

/// Random matrix with orthonormal columns (QR of a Gaussian draw).
pub fn random_orthonormal(rows: usize, k: usize, rng: &mut ChaCha12Rng) -> Result<DenseMatrix> {
    if k == 0 || k > rows {
        return Err(Error::InvalidInput(format!(
            "need 1 <= k <= rows, got k = {k}, rows = {rows}"
        )));
    }
    let normal = StandardNormal;
    let g = Array2::from_shape_fn((rows, k), |_| normal.sample(rng));
    let (q, _r) = g.qr()?;
    Ok(DenseMatrix::from_array_unchecked(
        q.slice(ndarray::s![.., ..k]).to_owned(),
    ))
}

/// Random matrix with a prescribed spectrum: `U diag(σ) Vᵀ` with random
/// orthonormal factors. `sigma` must be non-negative and non-increasing.
pub fn matrix_with_spectrum(
    m1: usize,
    m2: usize,
    sigma: &[f64],
    rng: &mut ChaCha12Rng,
) -> Result<DenseMatrix> {
    let k = sigma.len();
    if k == 0 || k > m1.min(m2) {
        return Err(Error::InvalidInput(format!(
            "spectrum length {k} outside [1, min(m1, m2)]"
        )));
    }
    if sigma.windows(2).any(|w| w[0] < w[1]) || sigma.iter().any(|&s| s < 0.0) {
        return Err(Error::InvalidInput(
            "spectrum must be non-negative and non-increasing".into(),
        ));
    }
    let u = random_orthonormal(m1, k, rng)?;
    let v = random_orthonormal(m2, k, rng)?;
    let mut scaled = u.as_array().to_owned();
    for (mut col, &s) in scaled.columns_mut().into_iter().zip(sigma.iter()) {
        col.mapv_inplace(|x| x * s);
    }
    DenseMatrix::from_array(scaled.dot(&v.as_array().t()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    fn base_spec() -> ScenarioSpec {
        ScenarioSpec {
            m1: 20,
            m2: 20,
            r: 2,
            scheme: Scheme::S1,
            sampling_ratio: 0.5,
            snr_db: None,
            seed: 7,
        }
    }

    #[test]
    fn scenario_validation() {
        assert!(base_spec().validated().is_ok());
        let mut s = base_spec();
        s.r = 21;
        assert!(s.validated().is_err());
        let mut s = base_spec();
        s.sampling_ratio = 0.0;
        assert!(s.validated().is_err());
        let mut s = base_spec();
        s.m1 = 9;
        s.scheme = Scheme::S2;
        assert!(s.validated().is_err());
    }

    #[test]
    fn ground_truth_from_stub_factors() {
        let u = array![[1.0], [2.0]];
        let v = array![[3.0], [4.0]];
        let a0 = ground_truth_from_factors(&u, &v).unwrap();
        assert_eq!(
            a0.as_array().as_slice().unwrap(),
            &[3.0, 4.0, 6.0, 8.0]
        );
    }

    #[test]
    fn ground_truth_rank_and_determinism() {
        // Numerical rank equals r across many seeds.
        for seed in 0..100u64 {
            let spec = ScenarioSpec {
                m1: 30,
                m2: 20,
                r: 4,
                seed,
                ..base_spec()
            };
            let a0 = generate_ground_truth(&spec).unwrap();
            let s = a0.svd().unwrap().singular_values;
            let rank = s.iter().filter(|&&v| v > 1e-10 * s[0]).count();
            assert_eq!(rank, 4, "seed {seed}");
        }
        // Same seed, same matrix.
        let spec = base_spec();
        let x = generate_ground_truth(&spec).unwrap();
        let y = generate_ground_truth(&spec).unwrap();
        assert_eq!(x, y);
    }

    #[test]
    fn marginals_match_hand_normalization() {
        assert_eq!(
            scheme_marginals(4, Scheme::S1).unwrap(),
            vec![0.25, 0.25, 0.25, 0.25]
        );

        // m = 10, scheme 2: shares 2 + 4 + 8 = 14.
        let p = scheme_marginals(10, Scheme::S2).unwrap();
        assert!((p[0] - 2.0 / 14.0).abs() < 1e-15);
        assert!((p[1] - 4.0 / 14.0).abs() < 1e-15);
        for k in 2..10 {
            assert!((p[k] - 1.0 / 14.0).abs() < 1e-15);
        }

        // m = 10, scheme 3: shares 3 + 9 + 8 = 20.
        let p = scheme_marginals(10, Scheme::S3).unwrap();
        assert!((p[0] - 3.0 / 20.0).abs() < 1e-15);
        assert!((p[1] - 9.0 / 20.0).abs() < 1e-15);
        assert!((p[9] - 1.0 / 20.0).abs() < 1e-15);

        assert!(scheme_marginals(9, Scheme::S2).is_err());
    }

    #[test]
    fn marginals_normalize_across_sizes() {
        for m in [10usize, 37, 100, 300, 500, 731, 1000] {
            for scheme in [Scheme::S1, Scheme::S2, Scheme::S3] {
                let p = scheme_marginals(m, scheme).unwrap();
                let sum: f64 = p.iter().sum();
                assert!(
                    (sum - 1.0).abs() <= 1e-12,
                    "m={m} {scheme}: sum {sum}"
                );
                assert!(p.iter().all(|&v| v > 0.0));
            }
        }
        // p0 = 1/(1.4 m) for scheme 2 when 10 | m.
        for m in [10usize, 100, 300, 500] {
            let p = scheme_marginals(m, Scheme::S2).unwrap();
            let p0 = p[m - 1];
            assert!((p0 - 1.0 / (1.4 * m as f64)).abs() < 1e-15, "m={m}");
        }
    }

    #[test]
    fn mask_is_exhaustive_at_full_sampling_and_reproducible() {
        for scheme in [Scheme::S1, Scheme::S3] {
            let spec = ScenarioSpec {
                m1: 12,
                m2: 10,
                sampling_ratio: 1.0,
                scheme,
                ..base_spec()
            };
            let dist = scenario_distribution(&spec).unwrap();
            let idx = sample_mask(&spec, &dist).unwrap();
            assert_eq!(idx.len(), 120);
            let expected: Vec<(usize, usize)> =
                (0..12).flat_map(|i| (0..10).map(move |j| (i, j))).collect();
            assert_eq!(idx, expected);
        }

        let spec = ScenarioSpec {
            sampling_ratio: 0.3,
            ..base_spec()
        };
        let dist = scenario_distribution(&spec).unwrap();
        let first = sample_mask(&spec, &dist).unwrap();
        let second = sample_mask(&spec, &dist).unwrap();
        assert_eq!(first, second);
        assert_eq!(first.len(), spec.observation_count());
        let distinct: std::collections::HashSet<_> = first.iter().collect();
        assert_eq!(distinct.len(), first.len());
    }

    #[test]
    fn uniform_mask_row_frequencies() {
        let spec = ScenarioSpec {
            m1: 50,
            m2: 50,
            sampling_ratio: 0.3,
            ..base_spec()
        };
        let n = spec.observation_count();
        let dist = scenario_distribution(&spec).unwrap();
        let mut counts = vec![0.0f64; 50];
        let seeds = 20;
        for seed in 0..seeds {
            let s = spec.with_seed(seed);
            for (r, _) in sample_mask(&s, &dist).unwrap() {
                counts[r] += 1.0;
            }
        }
        let tol = 3.0 / (n as f64).sqrt();
        for (r, c) in counts.iter().enumerate() {
            let freq = c / (seeds as f64 * n as f64);
            assert!(
                (freq - 0.02).abs() <= tol,
                "row {r}: frequency {freq} vs 1/m1 = 0.02 (tol {tol})"
            );
        }
    }

    #[test]
    fn noise_free_observation_matches_truth_exactly() {
        let spec = base_spec();
        let a0 = generate_ground_truth(&spec).unwrap();
        let dist = scenario_distribution(&spec).unwrap();
        let idx = sample_mask(&spec, &dist).unwrap();
        let obs = apply_noise(&a0, &idx, None, spec.seed).unwrap();
        for &(r, c, v) in obs.samples() {
            assert_eq!(v, a0.get(r, c));
        }
    }

    #[test]
    fn snr_zero_db_sets_sigma_to_signal_energy() {
        let a0 = DenseMatrix::new(2, 2, vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let idx = vec![(0, 0), (1, 1)];
        // SNR 0 dB: sigma² = Σ signal² = 17.
        let obs = apply_noise(&a0, &idx, Some(0.0), 3).unwrap();
        let sigma = 17f64.sqrt();
        for (&(r, c, v), &(ri, ci)) in obs.samples().iter().zip(idx.iter()) {
            assert_eq!((r, c), (ri, ci));
            // Noise is sigma times a standard normal draw; just check scale.
            assert!((v - a0.get(r, c)).abs() < 6.0 * sigma);
        }
    }

    #[test]
    fn realized_snr_matches_requested_level() {
        let spec = ScenarioSpec {
            m1: 40,
            m2: 40,
            r: 3,
            sampling_ratio: 0.5,
            snr_db: Some(10.0),
            ..base_spec()
        };
        let mut db_sum = 0.0;
        let seeds = 20;
        for seed in 0..seeds {
            let s = spec.with_seed(seed);
            let a0 = generate_ground_truth(&s).unwrap();
            let dist = scenario_distribution(&s).unwrap();
            let idx = sample_mask(&s, &dist).unwrap();
            let obs = apply_noise(&a0, &idx, Some(10.0), s.seed).unwrap();
            let mut signal = 0.0;
            let mut noise = 0.0;
            for &(r, c, v) in obs.samples() {
                let t = a0.get(r, c);
                signal += t * t;
                noise += (v - t) * (v - t);
            }
            db_sum += 10.0 * (signal / noise).log10();
        }
        let mean_db = db_sum / seeds as f64;
        assert!(
            (mean_db - 10.0).abs() <= 1.0,
            "mean realized SNR {mean_db} dB"
        );
    }

    #[test]
    fn degenerate_signal_is_rejected() {
        let a0 = DenseMatrix::zeros(3, 3);
        let idx = vec![(0, 0), (1, 1)];
        assert!(matches!(
            apply_noise(&a0, &idx, Some(10.0), 1),
            Err(Error::Degenerate(_))
        ));
        // Noiseless mode is fine on the same input.
        assert!(apply_noise(&a0, &idx, None, 1).is_ok());
    }

    #[test]
    fn spectrum_construction_is_exact() {
        let mut rng = ChaCha12Rng::seed_from_u64(3);
        let sigma = [4.0, 2.5, 1.0];
        let m = matrix_with_spectrum(7, 5, &sigma, &mut rng).unwrap();
        let got = m.svd().unwrap().singular_values;
        for (g, s) in got.iter().zip(sigma.iter()) {
            assert!((g - s).abs() < 1e-10);
        }
        for g in got.iter().skip(3) {
            assert!(*g < 1e-10);
        }
    }
}
