//! Metrics, hyperparameter tuning, and benchmark campaigns.
//!
//! Tuning follows a plain grid search: every `(λ, a)` cell gets a full solve
//! and the cell with the smallest score wins (relative error against a known
//! truth, or root mean squared error on held-out validation entries).
//! Regularization weights are specified as multipliers of `‖Y‖_F`, the
//! Frobenius norm of the observed values, so grids transfer across problem
//! sizes.
//!
//! Campaigns tune once on a dedicated realization (the scenario seed), then
//! evaluate the frozen `(λ-multiplier, a)` choice on fresh seeds, reporting
//! per-trial records plus mean/standard-deviation aggregates. Cells and
//! trials fan out through [`crate::parallel::indexed_map`]; results are
//! merged in canonical order so output does not depend on scheduling.
//!
//! Per-trial CSV output deliberately omits wall-clock timing: identical
//! seeds must reproduce identical bytes. Timing lives in the in-memory
//! records and the JSON emitted by the command-line layer.

use serde::Serialize;

use crate::admm::solve;
use crate::config::{Regularizer, SolverConfig};
use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;
use crate::observations::ObservationSet;
use crate::parallel::{indexed_map, indexed_map_seq};
use crate::synthetic::{generate_instance, ScenarioSpec};

/// `‖estimate − truth‖_F / ‖truth‖_F`.
pub fn relative_error(estimate: &DenseMatrix, truth: &DenseMatrix) -> Result<f64> {
    let denom = truth.frobenius_norm();
    if denom == 0.0 {
        return Err(Error::Degenerate(
            "relative error undefined against a zero truth".into(),
        ));
    }
    Ok(estimate.frobenius_distance(truth)? / denom)
}

/// Root mean squared prediction error over held-out entries.
pub fn trmse(estimate: &DenseMatrix, eval_entries: &[(usize, usize, f64)]) -> Result<f64> {
    if eval_entries.is_empty() {
        return Err(Error::InvalidInput(
            "evaluation entry list must be non-empty".into(),
        ));
    }
    let mut acc = 0.0;
    for &(r, c, v) in eval_entries {
        if r >= estimate.rows() || c >= estimate.cols() {
            return Err(Error::IndexOutOfBounds {
                row: r,
                col: c,
                rows: estimate.rows(),
                cols: estimate.cols(),
            });
        }
        let e = estimate.get(r, c) - v;
        acc += e * e;
    }
    Ok((acc / eval_entries.len() as f64).sqrt())
}

/// Grid of candidate regularization weights and transformed-L1 parameters.
///
/// `lambda_multipliers` scale `‖Y‖_F`; `a_values` are taken as given (and
/// ignored in nuclear mode). `fixed` supplies everything else: regularizer,
/// `ζ`, `ρ`, `τ`, tolerance, and the iteration cap (its `lambda` and `a` are
/// placeholders overwritten per cell).
#[derive(Debug, Clone, Serialize)]
pub struct TuningGrid {
    pub lambda_multipliers: Vec<f64>,
    pub a_values: Vec<f64>,
    pub fixed: SolverConfig,
}

/// Standard λ-multiplier grid: `10^-1 … 10^-6`.
pub const STANDARD_LAMBDA_MULTIPLIERS: [f64; 6] = [1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6];

/// Standard grid of transformed-L1 parameters.
pub const STANDARD_A_VALUES: [f64; 12] = [
    0.1, 1.0, 10.0, 20.0, 50.0, 100.0, 200.0, 500.0, 600.0, 900.0, 1500.0, 3000.0,
];

impl TuningGrid {
    /// The standard grids around a fixed solver template.
    pub fn standard(fixed: SolverConfig) -> Self {
        Self {
            lambda_multipliers: STANDARD_LAMBDA_MULTIPLIERS.to_vec(),
            a_values: STANDARD_A_VALUES.to_vec(),
            fixed,
        }
    }

    pub fn validated(self) -> Result<Self> {
        if self.lambda_multipliers.is_empty() {
            return Err(Error::InvalidInput(
                "lambda multiplier grid must be non-empty".into(),
            ));
        }
        if self.a_values.is_empty() {
            return Err(Error::InvalidInput("a grid must be non-empty".into()));
        }
        if self
            .lambda_multipliers
            .iter()
            .chain(self.a_values.iter())
            .any(|v| !(v.is_finite() && *v > 0.0))
        {
            return Err(Error::InvalidInput(
                "grid values must be positive and finite".into(),
            ));
        }
        Ok(self)
    }
}

/// What a grid cell is scored on.
#[derive(Debug, Clone, Copy)]
pub enum GridObjective<'a> {
    /// Relative error against a known ground truth.
    ReVsTruth(&'a DenseMatrix),
    /// Root mean squared error on held-out validation entries.
    TrmseOnValidation(&'a [(usize, usize, f64)]),
}

/// One evaluated grid cell.
#[derive(Debug, Clone, Serialize)]
pub struct SurfaceCell {
    pub lambda_multiplier: f64,
    pub lambda: f64,
    pub a: f64,
    /// Objective value; `+∞` when the solve diverged.
    pub score: f64,
    pub estimated_rank: usize,
    pub iterations: usize,
    pub converged: bool,
}

/// Grid search outcome: the winning configuration and the full surface.
#[derive(Debug, Clone, Serialize)]
pub struct GridSearchResult {
    pub best_config: SolverConfig,
    pub best_score: f64,
    pub best_lambda_multiplier: f64,
    pub surface: Vec<SurfaceCell>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum ExecMode {
    Default,
    Sequential,
}

fn map_cells<T, F>(mode: ExecMode, n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    match mode {
        ExecMode::Default => indexed_map(n, f),
        ExecMode::Sequential => indexed_map_seq(n, f),
    }
}

fn score_report(
    report: &crate::config::SolveReport,
    objective: GridObjective<'_>,
) -> Result<f64> {
    match objective {
        GridObjective::ReVsTruth(truth) => relative_error(&report.estimate, truth),
        GridObjective::TrmseOnValidation(entries) => trmse(&report.estimate, entries),
    }
}

fn evaluate_cell(
    obs: &ObservationSet,
    config: &SolverConfig,
    lambda_multiplier: f64,
    objective: GridObjective<'_>,
) -> Result<SurfaceCell> {
    match solve(obs, config) {
        Ok(report) => Ok(SurfaceCell {
            lambda_multiplier,
            lambda: config.lambda,
            a: config.a,
            score: score_report(&report, objective)?,
            estimated_rank: report.estimated_rank,
            iterations: report.iterations,
            converged: report.converged,
        }),
        // A diverged cell scores +∞ but does not abort the search.
        Err(e) if e.is_numerical() => Ok(SurfaceCell {
            lambda_multiplier,
            lambda: config.lambda,
            a: config.a,
            score: f64::INFINITY,
            estimated_rank: 0,
            iterations: 0,
            converged: false,
        }),
        Err(e) => Err(e),
    }
}

pub(crate) fn grid_search_with_mode(
    obs: &ObservationSet,
    grid: &TuningGrid,
    objective: GridObjective<'_>,
    mode: ExecMode,
) -> Result<GridSearchResult> {
    let grid = grid.clone().validated()?;
    let y_norm = obs.value_frobenius_norm();
    // In nuclear mode the penalty ignores `a`; collapse that axis.
    let a_values: Vec<f64> = match grid.fixed.regularizer {
        Regularizer::Tl1 => grid.a_values.clone(),
        Regularizer::Nuclear => vec![grid.fixed.a],
    };
    let mut cells: Vec<(f64, f64)> = Vec::new();
    for &a in &a_values {
        for &mult in &grid.lambda_multipliers {
            cells.push((a, mult));
        }
    }

    let outcomes: Vec<Result<SurfaceCell>> = map_cells(mode, cells.len(), |i| {
        let (a, mult) = cells[i];
        let config = grid
            .fixed
            .clone()
            .with_lambda(mult * y_norm)
            .with_a(a)
            .validated()?;
        evaluate_cell(obs, &config, mult, objective)
    });
    let mut surface = Vec::with_capacity(outcomes.len());
    for outcome in outcomes {
        surface.push(outcome?);
    }

    // Argmin with ties broken toward smaller a, then smaller λ.
    let best = surface
        .iter()
        .min_by(|x, y| {
            (x.score, x.a, x.lambda)
                .partial_cmp(&(y.score, y.a, y.lambda))
                .expect("scores are never NaN")
        })
        .expect("surface is non-empty")
        .clone();

    let best_config = grid
        .fixed
        .clone()
        .with_lambda(best.lambda)
        .with_a(best.a)
        .validated()?;
    Ok(GridSearchResult {
        best_config,
        best_score: best.score,
        best_lambda_multiplier: best.lambda_multiplier,
        surface,
    })
}

/// Evaluates every grid cell with a full solve and returns the argmin
/// configuration together with the whole `(λ, a, score)` surface.
pub fn grid_search(
    obs: &ObservationSet,
    grid: &TuningGrid,
    objective: GridObjective<'_>,
) -> Result<GridSearchResult> {
    grid_search_with_mode(obs, grid, objective, ExecMode::Default)
}

/// One row of a parameter-`a` sweep.
#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub a: f64,
    pub best_lambda_multiplier: f64,
    pub best_lambda: f64,
    /// Best relative error over the λ grid at this `a` (`+∞` if every cell
    /// diverged).
    pub re: f64,
    /// Estimated rank of the estimator at the best λ.
    pub estimated_rank: usize,
    pub iterations: usize,
    pub converged: bool,
}

/// For each `a`, tunes λ only (against the truth of one scenario
/// realization) and records the best relative error and the rank of that
/// estimator.
pub fn a_sweep(
    scenario: &ScenarioSpec,
    a_values: &[f64],
    lambda_multipliers: &[f64],
    fixed: &SolverConfig,
) -> Result<Vec<SweepRow>> {
    a_sweep_with_mode(scenario, a_values, lambda_multipliers, fixed, ExecMode::Default)
}

pub(crate) fn a_sweep_with_mode(
    scenario: &ScenarioSpec,
    a_values: &[f64],
    lambda_multipliers: &[f64],
    fixed: &SolverConfig,
    mode: ExecMode,
) -> Result<Vec<SweepRow>> {
    if a_values.is_empty() {
        return Err(Error::InvalidInput("a sweep needs at least one value".into()));
    }
    let (a0, obs) = generate_instance(scenario)?;
    let mut template = fixed.clone();
    template.zeta = 1.2 * a0.inf_norm();
    template.regularizer = Regularizer::Tl1;

    let rows = map_cells(mode, a_values.len(), |i| -> Result<SweepRow> {
        let grid = TuningGrid {
            lambda_multipliers: lambda_multipliers.to_vec(),
            a_values: vec![a_values[i]],
            fixed: template.clone(),
        };
        let result =
            grid_search_with_mode(&obs, &grid, GridObjective::ReVsTruth(&a0), ExecMode::Sequential)?;
        let best = result
            .surface
            .iter()
            .min_by(|x, y| {
                (x.score, x.lambda)
                    .partial_cmp(&(y.score, y.lambda))
                    .expect("scores are never NaN")
            })
            .expect("non-empty surface");
        Ok(SweepRow {
            a: a_values[i],
            best_lambda_multiplier: best.lambda_multiplier,
            best_lambda: best.lambda,
            re: best.score,
            estimated_rank: best.estimated_rank,
            iterations: best.iterations,
            converged: best.converged,
        })
    });
    rows.into_iter().collect()
}

/// One evaluated trial of a campaign.
#[derive(Debug, Clone, Serialize)]
pub struct TrialRecord {
    pub scenario: String,
    pub method: Regularizer,
    pub trial: usize,
    pub seed: u64,
    pub re: f64,
    pub trmse: Option<f64>,
    pub estimated_rank: usize,
    pub iterations: usize,
    pub converged: bool,
    pub seconds: f64,
}

/// Mean/standard-deviation summary of one (scenario, method) cell.
#[derive(Debug, Clone, Serialize)]
pub struct CellAggregate {
    pub scenario: String,
    pub method: Regularizer,
    pub trials: usize,
    pub mean_re: f64,
    pub std_re: f64,
    pub mean_rank: f64,
    pub mean_iterations: f64,
    pub mean_seconds: f64,
}

/// The tuned choice frozen for one (scenario, method) cell.
#[derive(Debug, Clone, Serialize)]
pub struct TunedChoice {
    pub scenario: String,
    pub method: Regularizer,
    pub lambda_multiplier: f64,
    pub a: f64,
    pub tuning_score: f64,
}

/// Full campaign output; aggregates are recomputable from the records.
#[derive(Debug, Clone, Serialize)]
pub struct CampaignResult {
    pub records: Vec<TrialRecord>,
    pub aggregates: Vec<CellAggregate>,
    pub tuned: Vec<TunedChoice>,
}

/// Recomputes the aggregate table from per-trial records, grouping by
/// (scenario, method) in first-appearance order.
pub fn aggregate_records(records: &[TrialRecord]) -> Vec<CellAggregate> {
    let mut order: Vec<(String, Regularizer)> = Vec::new();
    for r in records {
        let key = (r.scenario.clone(), r.method);
        if !order.contains(&key) {
            order.push(key);
        }
    }
    order
        .into_iter()
        .map(|(scenario, method)| {
            let group: Vec<&TrialRecord> = records
                .iter()
                .filter(|r| r.scenario == scenario && r.method == method)
                .collect();
            let n = group.len();
            let nf = n as f64;
            let mean_re = group.iter().map(|r| r.re).sum::<f64>() / nf;
            let std_re = if n > 1 {
                (group
                    .iter()
                    .map(|r| (r.re - mean_re) * (r.re - mean_re))
                    .sum::<f64>()
                    / (nf - 1.0))
                    .sqrt()
            } else {
                0.0
            };
            CellAggregate {
                scenario,
                method,
                trials: n,
                mean_re,
                std_re,
                mean_rank: group.iter().map(|r| r.estimated_rank as f64).sum::<f64>() / nf,
                mean_iterations: group.iter().map(|r| r.iterations as f64).sum::<f64>() / nf,
                mean_seconds: group.iter().map(|r| r.seconds).sum::<f64>() / nf,
            }
        })
        .collect()
}

/// Tunes each (scenario, method) on the scenario seed, then evaluates the
/// frozen `(λ-multiplier, a)` on `trials` fresh seeds
/// (`seed + 1 … seed + trials`). The entrywise bound is set per realization
/// to `1.2 · ‖A0‖_∞`.
pub fn run_campaign(
    scenarios: &[ScenarioSpec],
    methods: &[Regularizer],
    trials: usize,
    grid: &TuningGrid,
) -> Result<CampaignResult> {
    run_campaign_with_mode(scenarios, methods, trials, grid, ExecMode::Default)
}

pub(crate) fn run_campaign_with_mode(
    scenarios: &[ScenarioSpec],
    methods: &[Regularizer],
    trials: usize,
    grid: &TuningGrid,
    mode: ExecMode,
) -> Result<CampaignResult> {
    if trials == 0 {
        return Err(Error::InvalidInput("trials must be positive".into()));
    }
    if scenarios.is_empty() || methods.is_empty() {
        return Err(Error::InvalidInput(
            "campaign needs at least one scenario and one method".into(),
        ));
    }
    let mut records = Vec::new();
    let mut tuned = Vec::new();

    for scenario in scenarios {
        let scenario = scenario.clone().validated()?;
        let (a0_tune, obs_tune) = generate_instance(&scenario)?;
        for &method in methods {
            let mut fixed = grid.fixed.clone();
            fixed.regularizer = method;
            fixed.zeta = 1.2 * a0_tune.inf_norm();
            let cell_grid = TuningGrid {
                lambda_multipliers: grid.lambda_multipliers.clone(),
                a_values: grid.a_values.clone(),
                fixed,
            };
            let search = grid_search_with_mode(
                &obs_tune,
                &cell_grid,
                GridObjective::ReVsTruth(&a0_tune),
                mode,
            )?;
            tuned.push(TunedChoice {
                scenario: scenario.label(),
                method,
                lambda_multiplier: search.best_lambda_multiplier,
                a: search.best_config.a,
                tuning_score: search.best_score,
            });

            let trial_results: Vec<Result<TrialRecord>> = map_cells(mode, trials, |t| {
                let seed = scenario.seed + 1 + t as u64;
                let trial_spec = scenario.with_seed(seed);
                let (a0, obs) = generate_instance(&trial_spec)?;
                let config = search
                    .best_config
                    .clone()
                    .with_lambda(search.best_lambda_multiplier * obs.value_frobenius_norm());
                let mut config = config;
                config.zeta = 1.2 * a0.inf_norm();
                let config = config.validated()?;
                let report = solve(&obs, &config)?;
                Ok(TrialRecord {
                    scenario: scenario.label(),
                    method,
                    trial: t,
                    seed,
                    re: relative_error(&report.estimate, &a0)?,
                    trmse: None,
                    estimated_rank: report.estimated_rank,
                    iterations: report.iterations,
                    converged: report.converged,
                    seconds: report.elapsed_seconds,
                })
            });
            for r in trial_results {
                records.push(r?);
            }
        }
    }

    let aggregates = aggregate_records(&records);
    Ok(CampaignResult {
        records,
        aggregates,
        tuned,
    })
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Per-trial CSV (no timing columns; byte-stable across reruns).
pub fn campaign_trials_csv(result: &CampaignResult) -> String {
    let mut out =
        String::from("scenario,method,trial,seed,re,trmse,estimated_rank,iterations,converged\n");
    for r in &result.records {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            r.scenario,
            r.method,
            r.trial,
            r.seed,
            r.re,
            fmt_opt(r.trmse),
            r.estimated_rank,
            r.iterations,
            r.converged
        ));
    }
    out
}

/// Aggregate CSV (no timing columns; byte-stable across reruns).
pub fn campaign_aggregates_csv(result: &CampaignResult) -> String {
    let mut out = String::from("scenario,method,trials,mean_re,std_re,mean_rank\n");
    for a in &result.aggregates {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            a.scenario, a.method, a.trials, a.mean_re, a.std_re, a.mean_rank
        ));
    }
    out
}

/// Sweep rows as plot-ready CSV.
pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(
        "a,best_lambda_multiplier,best_lambda,re,estimated_rank,iterations,converged\n",
    );
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.a,
            r.best_lambda_multiplier,
            r.best_lambda,
            r.re,
            r.estimated_rank,
            r.iterations,
            r.converged
        ));
    }
    out
}

/// Full tuning surface as CSV.
pub fn surface_csv(result: &GridSearchResult) -> String {
    let mut out =
        String::from("a,lambda_multiplier,lambda,score,estimated_rank,iterations,converged\n");
    for c in &result.surface {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            c.a, c.lambda_multiplier, c.lambda, c.score, c.estimated_rank, c.iterations, c.converged
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synthetic::Scheme;

    fn small_scenario(seed: u64) -> ScenarioSpec {
        ScenarioSpec {
            m1: 24,
            m2: 24,
            r: 2,
            scheme: Scheme::S1,
            sampling_ratio: 0.6,
            snr_db: Some(20.0),
            seed,
        }
    }

    fn small_template(reg: Regularizer) -> SolverConfig {
        let mut c = SolverConfig::new(reg, 1.0, 1.0, 1.0).unwrap();
        c.max_iters = 200;
        c.tol = 1e-5;
        c
    }

    #[test]
    fn relative_error_basics() {
        let t = DenseMatrix::new(2, 2, vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(relative_error(&t, &t).unwrap(), 0.0);
        let zero = DenseMatrix::zeros(2, 2);
        assert_eq!(relative_error(&zero, &t).unwrap(), 1.0);
        let scaled = DenseMatrix::from_array(t.as_array() * 1.1).unwrap();
        assert!((relative_error(&scaled, &t).unwrap() - 0.1).abs() <= 1e-12);
        assert!(relative_error(&t, &zero).is_err());

        // Scale equivariance.
        for c in [0.3, 2.0, 117.0] {
            let e = DenseMatrix::from_array(t.as_array() * 0.7).unwrap();
            let ec = DenseMatrix::from_array(e.as_array() * c).unwrap();
            let tc = DenseMatrix::from_array(t.as_array() * c).unwrap();
            let base = relative_error(&e, &t).unwrap();
            let scaled = relative_error(&ec, &tc).unwrap();
            assert!((base - scaled).abs() <= 1e-12);
        }
    }

    #[test]
    fn trmse_basics() {
        let m = DenseMatrix::new(2, 2, vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(trmse(&m, &[(0, 0, 1.0), (1, 1, 4.0)]).unwrap(), 0.0);
        assert_eq!(trmse(&m, &[(0, 1, 4.0)]).unwrap(), 2.0);
        assert!(trmse(&m, &[]).is_err());
        assert!(trmse(&m, &[(5, 0, 1.0)]).is_err());
    }

    #[test]
    fn singleton_grid_matches_direct_solve() {
        let scenario = small_scenario(3);
        let (a0, obs) = generate_instance(&scenario).unwrap();
        let mut fixed = small_template(Regularizer::Tl1);
        fixed.zeta = 1.2 * a0.inf_norm();
        let grid = TuningGrid {
            lambda_multipliers: vec![1e-4],
            a_values: vec![1.0],
            fixed: fixed.clone(),
        };
        let result = grid_search(&obs, &grid, GridObjective::ReVsTruth(&a0)).unwrap();
        assert_eq!(result.surface.len(), 1);

        let config = fixed
            .with_lambda(1e-4 * obs.value_frobenius_norm())
            .with_a(1.0);
        let report = solve(&obs, &config).unwrap();
        let re = relative_error(&report.estimate, &a0).unwrap();
        assert_eq!(result.best_score, re);
        assert_eq!(result.best_config.lambda, config.lambda);
    }

    #[test]
    fn dominated_cell_loses() {
        let scenario = small_scenario(5);
        let (a0, obs) = generate_instance(&scenario).unwrap();
        let mut fixed = small_template(Regularizer::Tl1);
        fixed.zeta = 1.2 * a0.inf_norm();
        // 1e1·‖Y‖_F wipes out the estimate entirely (RE = 1); 1e-4 recovers.
        let grid = TuningGrid {
            lambda_multipliers: vec![1e1, 1e-4],
            a_values: vec![1.0],
            fixed,
        };
        let result = grid_search(&obs, &grid, GridObjective::ReVsTruth(&a0)).unwrap();
        assert_eq!(result.best_lambda_multiplier, 1e-4);
        assert!(result.best_score < 0.5);
        let wiped = result
            .surface
            .iter()
            .find(|c| c.lambda_multiplier == 1e1)
            .unwrap();
        assert!((wiped.score - 1.0).abs() < 1e-6);
        assert_eq!(wiped.estimated_rank, 0);

        // Best score equals the surface minimum exactly.
        let min = result
            .surface
            .iter()
            .map(|c| c.score)
            .fold(f64::INFINITY, f64::min);
        assert_eq!(result.best_score, min);
    }

    #[test]
    fn nuclear_grid_collapses_a_axis() {
        let scenario = small_scenario(7);
        let (a0, obs) = generate_instance(&scenario).unwrap();
        let mut fixed = small_template(Regularizer::Nuclear);
        fixed.zeta = 1.2 * a0.inf_norm();
        let grid = TuningGrid {
            lambda_multipliers: vec![1e-2, 1e-3],
            a_values: vec![1.0, 10.0, 100.0],
            fixed,
        };
        let result = grid_search(&obs, &grid, GridObjective::ReVsTruth(&a0)).unwrap();
        assert_eq!(result.surface.len(), 2);
    }

    #[cfg(feature = "parallel")]
    #[test]
    fn grid_search_is_scheduling_independent() {
        let scenario = small_scenario(9);
        let (a0, obs) = generate_instance(&scenario).unwrap();
        let mut fixed = small_template(Regularizer::Tl1);
        fixed.zeta = 1.2 * a0.inf_norm();
        let grid = TuningGrid {
            lambda_multipliers: vec![1e-2, 1e-3, 1e-4],
            a_values: vec![1.0, 100.0],
            fixed,
        };
        let par =
            grid_search_with_mode(&obs, &grid, GridObjective::ReVsTruth(&a0), ExecMode::Default)
                .unwrap();
        let seq = grid_search_with_mode(
            &obs,
            &grid,
            GridObjective::ReVsTruth(&a0),
            ExecMode::Sequential,
        )
        .unwrap();
        assert_eq!(surface_csv(&par), surface_csv(&seq));
        assert_eq!(par.best_score, seq.best_score);
    }

    #[test]
    fn sweep_single_a_equals_restricted_grid_search() {
        let scenario = small_scenario(11);
        let fixed = small_template(Regularizer::Tl1);
        let rows = a_sweep(&scenario, &[10.0], &[1e-3, 1e-4], &fixed).unwrap();
        assert_eq!(rows.len(), 1);

        let (a0, obs) = generate_instance(&scenario).unwrap();
        let mut fixed2 = fixed;
        fixed2.zeta = 1.2 * a0.inf_norm();
        let grid = TuningGrid {
            lambda_multipliers: vec![1e-3, 1e-4],
            a_values: vec![10.0],
            fixed: fixed2,
        };
        let search = grid_search(&obs, &grid, GridObjective::ReVsTruth(&a0)).unwrap();
        assert_eq!(rows[0].re, search.best_score);
        assert_eq!(rows[0].best_lambda_multiplier, search.best_lambda_multiplier);
    }

    #[test]
    fn sweep_huge_a_matches_nuclear_baseline() {
        let scenario = small_scenario(13);
        let mut fixed = small_template(Regularizer::Tl1);
        fixed.max_iters = 300;
        let multipliers = vec![1e-2, 1e-3, 1e-4];
        let rows = a_sweep(&scenario, &[1e8], &multipliers, &fixed).unwrap();

        let (a0, obs) = generate_instance(&scenario).unwrap();
        let mut nuclear = fixed.clone().with_regularizer(Regularizer::Nuclear);
        nuclear.zeta = 1.2 * a0.inf_norm();
        nuclear.max_iters = 300;
        let grid = TuningGrid {
            lambda_multipliers: multipliers,
            a_values: vec![1.0],
            fixed: nuclear,
        };
        let search = grid_search(&obs, &grid, GridObjective::ReVsTruth(&a0)).unwrap();
        assert!(
            (rows[0].re - search.best_score).abs() <= 1e-3,
            "sweep at a=1e8: {} vs nuclear {}",
            rows[0].re,
            search.best_score
        );
    }

    #[test]
    fn single_trial_campaign_aggregates_trivially() {
        let grid = TuningGrid {
            lambda_multipliers: vec![1e-3, 1e-4],
            a_values: vec![1.0],
            fixed: small_template(Regularizer::Tl1),
        };
        let result =
            run_campaign(&[small_scenario(17)], &[Regularizer::Tl1], 1, &grid).unwrap();
        assert_eq!(result.records.len(), 1);
        assert_eq!(result.aggregates.len(), 1);
        let agg = &result.aggregates[0];
        assert_eq!(agg.trials, 1);
        assert_eq!(agg.mean_re, result.records[0].re);
        assert_eq!(agg.std_re, 0.0);

        // Aggregates recompute exactly from the records.
        let recomputed = aggregate_records(&result.records);
        assert_eq!(
            campaign_aggregates_csv(&CampaignResult {
                records: result.records.clone(),
                aggregates: recomputed,
                tuned: vec![],
            }),
            campaign_aggregates_csv(&result)
        );
    }

    #[cfg(feature = "parallel")]
    #[test]
    fn campaign_is_scheduling_independent() {
        let grid = TuningGrid {
            lambda_multipliers: vec![1e-3, 1e-4],
            a_values: vec![1.0, 100.0],
            fixed: small_template(Regularizer::Tl1),
        };
        let scenarios = [small_scenario(19)];
        let methods = [Regularizer::Tl1, Regularizer::Nuclear];
        let par =
            run_campaign_with_mode(&scenarios, &methods, 3, &grid, ExecMode::Default).unwrap();
        let seq =
            run_campaign_with_mode(&scenarios, &methods, 3, &grid, ExecMode::Sequential).unwrap();
        assert_eq!(campaign_trials_csv(&par), campaign_trials_csv(&seq));
        assert_eq!(campaign_aggregates_csv(&par), campaign_aggregates_csv(&seq));
    }
}
