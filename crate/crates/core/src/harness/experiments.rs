//! Instance grids and the seeded trial runner.

use rayon::prelude::*;

use super::config::{Algorithm, ExperimentConfig, ExperimentKind, EXP2_DEFAULT_N};
use super::report::{ExperimentReport, ReportRow, TrialResult};
use crate::baseline::uniform_kmeans;
use crate::classify::cluster_by_candidates;
use crate::detect::candidate_row;
use crate::env::{balanced_labels, Environment, ProblemInstance};
use crate::error::{Error, Result};
use crate::pipeline::{bandit_clustering, default_cap};
use crate::rng::{tag, SeedPath};

/// One point of the sparsity grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GapGridPoint {
    pub gamma: u32,
    pub s: usize,
    pub signal: Vec<f64>,
}

/// `s = ⌊(d−1)(γ−1)/19⌋ + 1` for `γ = 1..=20`, with signal `norm/√s` on the
/// first `s` features.
pub fn exp1_gap_grid(d: usize, norm: f64) -> Vec<GapGridPoint> {
    (1..=20u32)
        .map(|gamma| {
            let s = (d - 1) * (gamma as usize - 1) / 19 + 1;
            let mut signal = vec![0.0; d];
            signal[..s].fill(norm / (s as f64).sqrt());
            GapGridPoint { gamma, s, signal }
        })
        .collect()
}

/// `(n, d = 10n, signal)` with `support` features at `value`.
pub fn exp2_instances(n_grid: &[usize], value: f64, support: usize) -> Vec<(usize, usize, Vec<f64>)> {
    n_grid
        .iter()
        .map(|&n| {
            let d = 10 * n;
            let mut signal = vec![0.0; d];
            signal[..support.min(d)].fill(value);
            (n, d, signal)
        })
        .collect()
}

/// A concrete instance the runner iterates over.
#[derive(Debug, Clone)]
pub struct GridPoint {
    pub param: u64,
    pub instance: ProblemInstance,
}

pub fn grid_points(cfg: &ExperimentConfig) -> Result<Vec<GridPoint>> {
    match cfg.experiment {
        ExperimentKind::Exp1 => {
            let n = cfg.n.unwrap_or(20);
            let d = cfg.d.unwrap_or(1000);
            let grid = exp1_gap_grid(d, cfg.gap_norm.unwrap_or(15.0));
            let gammas = cfg.gammas.clone().unwrap_or_else(|| (1..=20).collect());
            gammas
                .iter()
                .map(|&g| {
                    let point = &grid[g as usize - 1];
                    Ok(GridPoint {
                        param: point.s as u64,
                        instance: ProblemInstance::zero_versus(point.signal.clone(), balanced_labels(n))?,
                    })
                })
                .collect()
        }
        ExperimentKind::Exp2 => {
            let n_grid = cfg.n_grid.clone().unwrap_or_else(|| EXP2_DEFAULT_N.to_vec());
            exp2_instances(&n_grid, cfg.gap_value.unwrap_or(5.0), cfg.support.unwrap_or(10))
                .into_iter()
                .map(|(n, _, signal)| {
                    Ok(GridPoint {
                        param: n as u64,
                        instance: ProblemInstance::zero_versus(signal, balanced_labels(n))?,
                    })
                })
                .collect()
        }
        ExperimentKind::Single => {
            let instance = cfg
                .instance
                .as_ref()
                .ok_or_else(|| Error::Config("missing instance".into()))?
                .build()?;
            Ok(vec![GridPoint { param: 0, instance }])
        }
        ExperimentKind::Bounds => Err(Error::Config(
            "bounds configs produce a bounds report, not trials".into(),
        )),
    }
}

fn environment(cfg: &ExperimentConfig, instance: &ProblemInstance, path: SeedPath) -> Result<Environment> {
    let cap = cfg.cap.unwrap_or_else(|| default_cap(instance));
    Ok(Environment::new(instance.clone(), cfg.noise, path.child(tag::NOISE).rng())?.with_cap(Some(cap)))
}

fn outcome<T>(res: Result<T>, env: &Environment, error: impl FnOnce(&T) -> bool) -> Result<TrialResult> {
    match res {
        Ok(v) => Ok(TrialResult {
            budget: env.ledger().total(),
            error: error(&v),
            emergency: false,
        }),
        Err(e) if e.is_budget_exhausted() => Ok(TrialResult {
            budget: env.ledger().total(),
            error: true,
            emergency: true,
        }),
        Err(e) => Err(e),
    }
}

/// One trial of one adaptive algorithm. `path` identifies the trial.
fn adaptive_trial(
    cfg: &ExperimentConfig,
    alg: Algorithm,
    instance: &ProblemInstance,
    delta: f64,
    path: SeedPath,
) -> Result<TrialResult> {
    let mut env = environment(cfg, instance, path)?;
    let mut rng = path.child(tag::ALGORITHM).rng();
    let truth = instance.labels();
    match alg {
        Algorithm::BanditClustering => {
            let out = bandit_clustering(&mut env, delta, &mut rng)?;
            Ok(TrialResult {
                budget: out.budget_total,
                error: !out.is_correct(truth),
                emergency: out.emergency_stopped,
            })
        }
        Algorithm::CandidateRow => {
            let res = candidate_row(&mut env, delta / 2.0, &mut rng);
            outcome(res, &env, |d| instance.label(d.candidate) == instance.label(1))
        }
        Algorithm::ClusterByCandidates => {
            let other = instance.first_other_item().ok_or(Error::DegenerateLabels)?;
            let res = cluster_by_candidates(&mut env, delta / 2.0, other, &mut rng);
            outcome(res, &env, |c| c.labels != truth)
        }
        Algorithm::UniformKmeans => unreachable!("baseline trials take a budget, not a confidence"),
    }
}

fn run_parallel<F>(trials: usize, f: F) -> Result<Vec<TrialResult>>
where
    F: Fn(u64) -> Result<TrialResult> + Sync + Send,
{
    (0..trials as u64).into_par_iter().map(f).collect()
}

/// Runs every configured algorithm on every grid point and confidence level,
/// `cfg.trials` times each, handing each aggregated row to `sink` as soon as
/// it is complete. Rows come out in grid, then delta, then algorithm order.
///
/// Trial `t` of grid point `g` draws from streams derived from
/// `(master_seed, g, t, algorithm, delta index)` only, so the report is a pure
/// function of the configuration.
pub fn run_trials_with<S: FnMut(&ReportRow)>(cfg: &ExperimentConfig, mut sink: S) -> Result<ExperimentReport> {
    cfg.validate()?;
    let points = grid_points(cfg)?;
    let deltas = cfg.deltas();
    let algorithms = cfg.algorithms();
    let root = SeedPath::root(cfg.master_seed);
    let name = cfg.experiment.name();
    let mut report = ExperimentReport::default();
    let mut emit = |row: ReportRow, report: &mut ExperimentReport| {
        sink(&row);
        report.rows.push(row);
    };

    for (g, point) in points.iter().enumerate() {
        let instance = &point.instance;
        let (n, d) = (instance.n(), instance.d());
        for (di, &delta) in deltas.iter().enumerate() {
            for &alg in algorithms.iter().filter(|&&a| a != Algorithm::UniformKmeans) {
                let results = run_parallel(cfg.trials, |t| {
                    let path = root.child(g as u64).child(t).child(alg.tag()).child(di as u64);
                    adaptive_trial(cfg, alg, instance, delta, path)
                })?;
                let row = ReportRow::aggregate(
                    format!("{name}:{}", alg.short()),
                    point.param,
                    n,
                    d,
                    Some(delta),
                    cfg.master_seed,
                    &results,
                );
                emit(row, &mut report);
            }
        }

        if let (true, Some(grid)) = (algorithms.contains(&Algorithm::UniformKmeans), &cfg.baseline) {
            let threshold = grid.threshold(cfg.trials);
            let mut first: Option<ReportRow> = None;
            for (bi, &budget) in grid.budgets().iter().enumerate() {
                let results = run_parallel(cfg.trials, |t| {
                    let path = root
                        .child(g as u64)
                        .child(t)
                        .child(Algorithm::UniformKmeans.tag())
                        .child(bi as u64);
                    let mut env =
                        Environment::new(instance.clone(), cfg.noise, path.child(tag::NOISE).rng())?.with_cap(None);
                    let out = uniform_kmeans(&mut env, budget, grid.restarts, &mut path.child(tag::BASELINE).rng())?;
                    Ok(TrialResult {
                        budget: out.budget_used,
                        error: out.labels != instance.labels(),
                        emergency: false,
                    })
                })?;
                let row = ReportRow::aggregate(
                    format!("{name}:uniform"),
                    point.param,
                    n,
                    d,
                    None,
                    cfg.master_seed,
                    &results,
                );
                if first.is_none() && row.error_rate <= threshold {
                    first = Some(ReportRow {
                        experiment: format!("{name}:uniform_first"),
                        ..row.clone()
                    });
                }
                emit(row, &mut report);
            }
            let first = first.unwrap_or_else(|| ReportRow {
                experiment: format!("{name}:uniform_first"),
                grid_param: point.param,
                n,
                d,
                delta: None,
                trials: cfg.trials,
                mean_budget: None,
                q05_budget: None,
                q95_budget: None,
                error_rate: f64::NAN,
                emergency_rate: 0.0,
                trials_counted: 0,
                seed: cfg.master_seed,
            });
            emit(first, &mut report);
        }
    }
    Ok(report)
}

pub fn run_trials(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    run_trials_with(cfg, |_| {})
}
