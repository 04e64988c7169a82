//! ClusterByCandidates: given an item from the other group, search its row
//! for a strongly discriminative feature and label every item on it.

use rand::Rng;
use serde::Serialize;

use crate::csh::{ceil_log2, compare_sequential_halving, min_budget, CshParams};
use crate::detect::{check_delta, MAX_ROUND};
use crate::env::Environment;
use crate::error::{Error, Result};

/// `⌈log2(16·d·ln(4·ln(8d)/δ))⌉`.
pub fn tilde_l_max(d: usize, delta: f64) -> Result<u32> {
    if d == 0 {
        return Err(Error::Domain("d must be positive".into()));
    }
    check_delta(delta)?;
    let d = d as f64;
    ceil_log2(16.0 * d * (4.0 * (8.0 * d).ln() / delta).ln())
}

/// `√(4·m·ln(n·k³/(0.15·δ)))`.
pub fn labeling_threshold(m: u64, n: usize, k: u32, delta: f64) -> f64 {
    let k3 = f64::from(k).powi(3);
    (4.0 * m as f64 * (n as f64 * k3 / (0.15 * delta)).ln()).sqrt()
}

/// Ratio between the acceptance threshold on the candidate's gap estimate
/// and the per-item labeling threshold.
pub const ACCEPT_FACTOR: f64 = 3.0;

/// First doubling exponent: `⌈log2 n⌉`.
pub fn first_round(n: usize) -> u32 {
    n.next_power_of_two().trailing_zeros()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassifyStep {
    pub k: u32,
    pub halving_steps: u32,
    pub feature: usize,
    pub draws: u64,
    pub d_hat: f64,
    pub epsilon: f64,
    pub accepted: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassifyOutcome {
    pub labels: Vec<u8>,
    pub chosen_feature: usize,
    pub k_final: u32,
    pub budget_spent: u64,
    pub labeling_spent: u64,
    pub epsilon_final: f64,
    pub d_hat: f64,
    pub delta: f64,
    pub trace: Vec<ClassifyStep>,
}

/// Runs ClusterByCandidates at confidence `delta` with candidate item
/// `candidate` (1-based, expected to differ from item 1).
///
/// For `k = ⌈log2 n⌉, …` and `L ≤ tilde_l_max` with `L·2^(L+1) ≤ 2^(k+1)`:
/// CSH on `{candidate}` picks a feature `ĵ`, `m = ⌊2^k/n⌋` paired draws give
/// `D̂`; when `|D̂| ≥ 3ε` items `2..=n` are labeled in index order, each from
/// `m` fresh paired draws, by `|D̂_i| ≥ ε`.
pub fn cluster_by_candidates<R: Rng + ?Sized>(
    env: &mut Environment,
    delta: f64,
    candidate: usize,
    rng: &mut R,
) -> Result<ClassifyOutcome> {
    let n = env.n();
    let lmax = tilde_l_max(env.d(), delta)?;
    if candidate < 2 || candidate > n {
        return Err(Error::Domain(format!(
            "candidate item must lie in 2..={n}, got {candidate}"
        )));
    }
    let start = env.ledger().total();
    let items = vec![candidate];
    let mut trace = Vec::new();

    for k in first_round(n)..=MAX_ROUND {
        let budget = 1u64 << (k + 1);
        let m = (1u64 << k) / n as u64;
        assert!(m >= 1, "k >= ceil(log2 n) guarantees at least one draw");
        let epsilon = labeling_threshold(m, n, k, delta);
        for halving_steps in (1..=lmax).take_while(|&l| min_budget(l) <= budget) {
            let csh = compare_sequential_halving(env, &CshParams::new(items.clone(), halving_steps, budget), rng)?;
            let (item, feature) = csh.pair;
            debug_assert_eq!(item, candidate);
            let d_hat = env.paired_sum(candidate, feature, m)?;
            let accepted = d_hat.abs() >= ACCEPT_FACTOR * epsilon;
            trace.push(ClassifyStep {
                k,
                halving_steps,
                feature,
                draws: m,
                d_hat,
                epsilon,
                accepted,
            });
            if !accepted {
                continue;
            }

            let before_labeling = env.ledger().total();
            let mut labels = vec![0u8; n];
            for (i, label) in labels.iter_mut().enumerate().skip(1) {
                let d_i = env.paired_sum(i + 1, feature, m)?;
                *label = u8::from(d_i.abs() >= epsilon);
            }
            return Ok(ClassifyOutcome {
                labels,
                chosen_feature: feature,
                k_final: k,
                budget_spent: env.ledger().total() - start,
                labeling_spent: env.ledger().total() - before_labeling,
                epsilon_final: epsilon,
                d_hat,
                delta,
                trace,
            });
        }
    }
    Err(Error::BudgetExhausted {
        spent: env.ledger().total(),
        cap: env.ledger().cap().unwrap_or(u64::MAX),
        requested: 0,
    })
}
