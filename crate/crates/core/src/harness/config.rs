//! JSON experiment configuration. Unknown keys are rejected.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::baseline::DEFAULT_RESTARTS;
use crate::env::{NoiseModel, ProblemInstance};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExperimentKind {
    Exp1,
    Exp2,
    Single,
    Bounds,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Exp1 => "exp1",
            ExperimentKind::Exp2 => "exp2",
            ExperimentKind::Single => "single",
            ExperimentKind::Bounds => "bounds",
        }
    }
}

/// Procedures the harness can run on each grid point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    /// Full pipeline at `δ`.
    BanditClustering,
    /// Candidate search alone at `δ/2`.
    CandidateRow,
    /// Labeling alone at `δ/2`, given the first item of the other group.
    ClusterByCandidates,
    /// Uniform sampling + 2-means on the baseline budget grid.
    UniformKmeans,
}

impl Algorithm {
    pub fn short(self) -> &'static str {
        match self {
            Algorithm::BanditClustering => "bc",
            Algorithm::CandidateRow => "cr",
            Algorithm::ClusterByCandidates => "cbc",
            Algorithm::UniformKmeans => "uniform",
        }
    }

    pub(crate) fn tag(self) -> u64 {
        match self {
            Algorithm::BanditClustering => 1,
            Algorithm::CandidateRow => 2,
            Algorithm::ClusterByCandidates => 3,
            Algorithm::UniformKmeans => 4,
        }
    }
}

/// Linear budget grid for the uniform baseline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BaselineGrid {
    pub t_min: u64,
    pub t_max: u64,
    #[serde(default = "default_steps")]
    pub steps: usize,
    #[serde(default = "default_restarts")]
    pub restarts: usize,
    /// Error level defining the baseline's required budget; defaults to
    /// 0.05 for at most 500 trials and 0.01 above.
    #[serde(default)]
    pub error_threshold: Option<f64>,
}

fn default_steps() -> usize {
    10
}

fn default_restarts() -> usize {
    DEFAULT_RESTARTS
}

impl BaselineGrid {
    /// `steps` evenly spaced budgets from `t_min` to `t_max` inclusive.
    pub fn budgets(&self) -> Vec<u64> {
        if self.steps <= 1 {
            return vec![self.t_min];
        }
        let span = (self.t_max - self.t_min) as u128;
        (0..self.steps)
            .map(|k| self.t_min + (span * k as u128 / (self.steps - 1) as u128) as u64)
            .collect()
    }

    pub fn threshold(&self, trials: usize) -> f64 {
        self.error_threshold.unwrap_or(if trials <= 500 { 0.05 } else { 0.01 })
    }
}

/// Explicit instance for `single` and `bounds` runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceSpec {
    pub mu_a: Vec<f64>,
    pub mu_b: Vec<f64>,
    pub labels: Vec<u8>,
}

impl InstanceSpec {
    pub fn build(&self) -> Result<ProblemInstance> {
        ProblemInstance::new(self.mu_a.clone(), self.mu_b.clone(), self.labels.clone())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    /// Item count (exp1 default 20).
    #[serde(default)]
    pub n: Option<usize>,
    /// Feature count (exp1 default 1000).
    #[serde(default)]
    pub d: Option<usize>,
    /// Item counts for exp2 (`d = 10·n`).
    #[serde(default)]
    pub n_grid: Option<Vec<usize>>,
    /// Subset of `1..=20` for exp1 (default all).
    #[serde(default)]
    pub gammas: Option<Vec<u32>>,
    #[serde(default)]
    pub deltas: Option<Vec<f64>>,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub master_seed: u64,
    /// Ledger cap per trial; per-instance default when absent.
    #[serde(default)]
    pub cap: Option<u64>,
    #[serde(default = "NoiseModel::standard_gaussian")]
    pub noise: NoiseModel,
    /// exp1: `‖Δ^s‖₂` (default 15).
    #[serde(default)]
    pub gap_norm: Option<f64>,
    /// exp2: value of the nonzero gaps (default 5).
    #[serde(default)]
    pub gap_value: Option<f64>,
    /// exp2: number of nonzero gaps (default 10).
    #[serde(default)]
    pub support: Option<usize>,
    #[serde(default)]
    pub algorithms: Option<Vec<Algorithm>>,
    #[serde(default)]
    pub baseline: Option<BaselineGrid>,
    #[serde(default)]
    pub instance: Option<InstanceSpec>,
    #[serde(default)]
    pub output: Option<PathBuf>,
}

fn default_trials() -> usize {
    100
}

pub const EXP2_DEFAULT_N: [usize; 6] = [100, 200, 500, 1000, 2000, 5000];

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Minimal config of the given kind with every optional field unset.
    pub fn new(experiment: ExperimentKind) -> Self {
        Self {
            experiment,
            n: None,
            d: None,
            n_grid: None,
            gammas: None,
            deltas: None,
            trials: default_trials(),
            master_seed: 0,
            cap: None,
            noise: NoiseModel::standard_gaussian(),
            gap_norm: None,
            gap_value: None,
            support: None,
            algorithms: None,
            baseline: None,
            instance: None,
            output: None,
        }
    }

    pub fn deltas(&self) -> Vec<f64> {
        self.deltas.clone().unwrap_or_else(|| match self.experiment {
            ExperimentKind::Exp2 => vec![0.8, 0.5, 0.2, 0.05],
            _ => vec![0.8],
        })
    }

    pub fn algorithms(&self) -> Vec<Algorithm> {
        self.algorithms.clone().unwrap_or_else(|| match self.experiment {
            ExperimentKind::Exp1 => {
                let mut algs = vec![
                    Algorithm::BanditClustering,
                    Algorithm::CandidateRow,
                    Algorithm::ClusterByCandidates,
                ];
                if self.baseline.is_some() {
                    algs.push(Algorithm::UniformKmeans);
                }
                algs
            }
            _ => vec![Algorithm::BanditClustering],
        })
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if self.trials == 0 {
            return bad("trials must be at least 1".into());
        }
        if let Some(&delta) = self.deltas().iter().find(|&&x| !(x > 0.0 && x < 1.0)) {
            return bad(format!("every delta must lie in (0, 1), got {delta}"));
        }
        if let Some(n) = self.n.filter(|&n| n < 2) {
            return bad(format!("n must be at least 2, got {n}"));
        }
        if self.d == Some(0) {
            return bad("d must be positive".into());
        }
        if let Some(grid) = &self.baseline {
            if grid.t_min > grid.t_max || grid.steps == 0 || grid.restarts == 0 {
                return bad("baseline grid needs t_min <= t_max, steps >= 1 and restarts >= 1".into());
            }
        }
        match self.experiment {
            ExperimentKind::Exp1 => {
                if self.d.unwrap_or(1000) < 20 {
                    return bad("exp1 needs d >= 20".into());
                }
                if let Some(g) = self
                    .gammas
                    .as_ref()
                    .and_then(|g| g.iter().find(|&&g| !(1..=20).contains(&g)))
                {
                    return bad(format!("gamma must lie in 1..=20, got {g}"));
                }
            }
            ExperimentKind::Exp2 => {
                if let Some(n) = self.n_grid.as_ref().and_then(|g| g.iter().find(|&&n| n < 2)) {
                    return bad(format!("exp2 item counts must be at least 2, got {n}"));
                }
            }
            ExperimentKind::Single | ExperimentKind::Bounds => {
                let Some(spec) = &self.instance else {
                    return bad(format!("{} needs an \"instance\"", self.experiment.name()));
                };
                spec.build().map_err(|e| Error::Config(e.to_string()))?;
            }
        }
        if self.algorithms().contains(&Algorithm::UniformKmeans) && self.baseline.is_none() {
            return bad("uniform_kmeans needs a \"baseline\" grid".into());
        }
        Ok(())
    }
}
