//! BanditClustering: CandidateRow then ClusterByCandidates, each at half
//! the confidence budget, with an emergency stop on the ledger cap.

use rand::Rng;
use serde::Serialize;

use crate::bounds::complexity_h;
use crate::classify::{cluster_by_candidates, ClassifyOutcome};
use crate::detect::{candidate_row, check_delta, DetectOutcome};
use crate::env::{Environment, ProblemInstance, DEFAULT_CAP};
use crate::error::Result;

/// Multiple of the instance complexity used as the simulation cap.
pub const CAP_COMPLEXITY_FACTOR: f64 = 65536.0;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PipelineOutcome {
    /// `None` when the run was emergency-stopped.
    pub labels: Option<Vec<u8>>,
    pub budget_total: u64,
    pub budget_detect: u64,
    pub budget_classify: u64,
    pub emergency_stopped: bool,
    pub detect: Option<DetectOutcome>,
    pub classify: Option<ClassifyOutcome>,
}

impl PipelineOutcome {
    pub fn candidate(&self) -> Option<usize> {
        self.detect.as_ref().map(|d| d.candidate)
    }

    /// Correct iff labels were returned and equal `truth`.
    pub fn is_correct(&self, truth: &[u8]) -> bool {
        self.labels.as_deref() == Some(truth)
    }
}

/// Runs the full pipeline at confidence `delta`. A `BudgetExhausted` error
/// from either phase is turned into an emergency-stopped outcome; any other
/// error is returned.
pub fn bandit_clustering<R: Rng + ?Sized>(env: &mut Environment, delta: f64, rng: &mut R) -> Result<PipelineOutcome> {
    check_delta(delta)?;
    let half = delta / 2.0;
    let start = env.ledger().total();
    let stopped = |env: &Environment, detect: Option<DetectOutcome>| {
        let total = env.ledger().total() - start;
        let budget_detect = detect.as_ref().map_or(total, |d| d.budget_spent);
        PipelineOutcome {
            labels: None,
            budget_total: total,
            budget_detect,
            budget_classify: total - budget_detect,
            emergency_stopped: true,
            detect,
            classify: None,
        }
    };

    let detect = match candidate_row(env, half, rng) {
        Ok(d) => d,
        Err(e) if e.is_budget_exhausted() => return Ok(stopped(env, None)),
        Err(e) => return Err(e),
    };
    let classify = match cluster_by_candidates(env, half, detect.candidate, rng) {
        Ok(c) => c,
        Err(e) if e.is_budget_exhausted() => return Ok(stopped(env, Some(detect))),
        Err(e) => return Err(e),
    };
    Ok(PipelineOutcome {
        labels: Some(classify.labels.clone()),
        budget_total: detect.budget_spent + classify.budget_spent,
        budget_detect: detect.budget_spent,
        budget_classify: classify.budget_spent,
        emergency_stopped: false,
        detect: Some(detect),
        classify: Some(classify),
    })
}

/// Simulation cap for an instance whose gaps are known to the harness:
/// `65536·H` (at most `2^42`), or `2^42` when `H` cannot be evaluated.
pub fn default_cap(instance: &ProblemInstance) -> u64 {
    let h = instance
        .balancedness()
        .and_then(|theta| complexity_h(&instance.gap_vector(), theta, instance.n()));
    match h {
        Ok(h) if h.is_finite() => ((CAP_COMPLEXITY_FACTOR * h).ceil() as u64).clamp(1, DEFAULT_CAP),
        _ => DEFAULT_CAP,
    }
}
