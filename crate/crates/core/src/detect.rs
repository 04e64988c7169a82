//! CandidateRow: find an item whose mean vector differs from item 1.

use rand::Rng;
use serde::Serialize;

use crate::csh::{ceil_log2, compare_sequential_halving, min_budget, CshParams};
use crate::env::Environment;
use crate::error::{Error, Result};

/// Doubling rounds are abandoned past this exponent; the ledger cap
/// normally stops a run long before.
pub const MAX_ROUND: u32 = 60;

pub(crate) fn check_delta(delta: f64) -> Result<()> {
    if delta > 0.0 && delta < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("delta must lie in (0, 1), got {delta}")))
    }
}

/// `⌈log2(16·d·n·ln(4·ln(8nd)/δ))⌉`.
pub fn l_max(n: usize, d: usize, delta: f64) -> Result<u32> {
    if n < 2 || d == 0 {
        return Err(Error::Domain(format!("need n >= 2 and d >= 1, got n = {n}, d = {d}")));
    }
    check_delta(delta)?;
    let nd = n as f64 * d as f64;
    ceil_log2(16.0 * nd * (4.0 * (8.0 * nd).ln() / delta).ln())
}

/// Hoeffding threshold on the sum of `2^k` paired differences:
/// `√(4·2^k·ln(k³/(0.15·δ)))`.
pub fn stopping_threshold(k: u32, delta: f64) -> f64 {
    let k3 = f64::from(k).powi(3);
    (4.0 * 2f64.powi(k as i32) * (k3 / (0.15 * delta)).ln()).sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DetectStep {
    pub k: u32,
    pub halving_steps: u32,
    pub pair: (usize, usize),
    pub csh_spent: u64,
    pub verify_spent: u64,
    pub statistic: f64,
    pub threshold: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DetectOutcome {
    pub candidate: usize,
    pub k_final: u32,
    pub budget_spent: u64,
    pub delta: f64,
    pub trace: Vec<DetectStep>,
}

/// Runs CandidateRow at confidence `delta`.
///
/// For `k = 1, 2, …` and every `L ≤ l_max` with `L·2^(L+1) ≤ 2^(k+1)`, CSH
/// over items `2..=n` with budget `2^(k+1)` proposes a cell `(î, ĵ)`; `2^k`
/// fresh paired draws on column `ĵ` are summed and `î` is returned as soon
/// as the absolute sum exceeds [`stopping_threshold`].
pub fn candidate_row<R: Rng + ?Sized>(env: &mut Environment, delta: f64, rng: &mut R) -> Result<DetectOutcome> {
    let n = env.n();
    let lmax = l_max(n, env.d(), delta)?;
    let items: Vec<usize> = (2..=n).collect();
    let start = env.ledger().total();
    let mut trace = Vec::new();

    for k in 1..=MAX_ROUND {
        let budget = 1u64 << (k + 1);
        let draws = 1u64 << k;
        let threshold = stopping_threshold(k, delta);
        for halving_steps in (1..=lmax).take_while(|&l| min_budget(l) <= budget) {
            let csh = compare_sequential_halving(env, &CshParams::new(items.clone(), halving_steps, budget), rng)?;
            let (item, feature) = csh.pair;
            let statistic = env.paired_sum(item, feature, draws)?;
            trace.push(DetectStep {
                k,
                halving_steps,
                pair: csh.pair,
                csh_spent: csh.budget_spent,
                verify_spent: 2 * draws,
                statistic,
                threshold,
            });
            // item 1 cannot certify anything
            if statistic.abs() > threshold && item != 1 {
                return Ok(DetectOutcome {
                    candidate: item,
                    k_final: k,
                    budget_spent: env.ledger().total() - start,
                    delta,
                    trace,
                });
            }
        }
    }
    Err(Error::BudgetExhausted {
        spent: env.ledger().total(),
        cap: env.ledger().cap().unwrap_or(u64::MAX),
        requested: 0,
    })
}
