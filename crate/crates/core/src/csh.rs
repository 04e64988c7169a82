//! CompareSequentialHalving: fixed-budget sequential halving over randomly
//! sub-sampled `(item, feature)` cells, each scored by its empirical
//! difference to row 1.

use rand::Rng;
use serde::Serialize;

use crate::env::Environment;
use crate::error::{Error, Result};

/// Largest number of halving steps accepted.
pub const MAX_HALVING_STEPS: u32 = 60;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CshParams {
    /// Candidate items (1-based), compared against item 1.
    pub items: Vec<usize>,
    pub halving_steps: u32,
    pub budget: u64,
}

impl CshParams {
    pub fn new(items: Vec<usize>, halving_steps: u32, budget: u64) -> Self {
        Self {
            items,
            halving_steps,
            budget,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.items.is_empty() {
            return Err(Error::EmptyItemSet);
        }
        if self.halving_steps == 0 || self.halving_steps > MAX_HALVING_STEPS {
            return Err(Error::Domain(format!(
                "halving steps must lie in 1..={MAX_HALVING_STEPS}, got {}",
                self.halving_steps
            )));
        }
        let required = min_budget(self.halving_steps);
        if self.budget < required {
            return Err(Error::InvalidBudget {
                budget: self.budget,
                halving_steps: self.halving_steps,
                required,
            });
        }
        Ok(())
    }
}

/// `L·2^(L+1)`: the smallest budget giving every round at least one draw.
pub fn min_budget(halving_steps: u32) -> u64 {
    u64::from(halving_steps).saturating_mul(1u64.checked_shl(halving_steps + 1).unwrap_or(u64::MAX))
}

/// `τ_l = ⌊T / (2^(L−l+2)·L)⌋`.
pub fn round_draws(budget: u64, halving_steps: u32, round: u32) -> u64 {
    let denom = (1u128 << (halving_steps - round + 2)) * u128::from(halving_steps);
    (u128::from(budget) / denom) as u64
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CshResult {
    /// Surviving `(item, feature)`, 1-based.
    pub pair: (usize, usize),
    pub budget_spent: u64,
    /// `τ_1, …, τ_L`.
    pub per_round_tau: Vec<u64>,
    /// `|S_0|, |S_1|, …, |S_L|`.
    pub set_sizes: Vec<usize>,
}

/// Runs one CompareSequentialHalving pass.
///
/// `S_0` holds `2^L` cells drawn uniformly with replacement from
/// `items × [d]` (item first, then feature, slot by slot). In round `l` every
/// surviving slot, in slot order, receives `τ_l` fresh paired draws from its
/// row and from row 1; the `2^(L−l)` slots with the largest absolute mean
/// difference survive, ties broken by slot order. Duplicate cells are
/// distinct slots and are re-sampled independently.
pub fn compare_sequential_halving<R: Rng + ?Sized>(
    env: &mut Environment,
    params: &CshParams,
    rng: &mut R,
) -> Result<CshResult> {
    params.validate()?;
    let d = env.d();
    for &item in &params.items {
        env.instance().check_index(item, 1)?;
    }
    let steps = params.halving_steps;
    let start = env.ledger().total();

    let mut slots = draw_initial_set(&params.items, d, steps, rng);

    let mut per_round_tau = Vec::with_capacity(steps as usize);
    let mut set_sizes = Vec::with_capacity(steps as usize + 1);
    set_sizes.push(slots.len());
    let mut scored: Vec<(usize, f64)> = Vec::with_capacity(slots.len());

    for round in 1..=steps {
        let tau = round_draws(params.budget, steps, round);
        debug_assert!(tau >= 1);
        per_round_tau.push(tau);

        scored.clear();
        for (pos, &(item, feature)) in slots.iter().enumerate() {
            let diff = env.paired_sum(item, feature, tau)? / tau as f64;
            scored.push((pos, diff.abs()));
        }
        let keep = 1usize << (steps - round);
        // stable: equal scores keep slot order
        scored.sort_by(|a, b| b.1.total_cmp(&a.1));
        let mut survivors: Vec<usize> = scored[..keep].iter().map(|&(pos, _)| pos).collect();
        survivors.sort_unstable();
        slots = survivors.into_iter().map(|pos| slots[pos]).collect();
        set_sizes.push(slots.len());
    }

    debug_assert_eq!(slots.len(), 1);
    Ok(CshResult {
        pair: slots[0],
        budget_spent: env.ledger().total() - start,
        per_round_tau,
        set_sizes,
    })
}

/// `S_0`: `2^L` cells drawn uniformly with replacement from `items × [d]`.
pub fn draw_initial_set<R: Rng + ?Sized>(
    items: &[usize],
    d: usize,
    halving_steps: u32,
    rng: &mut R,
) -> Vec<(usize, usize)> {
    (0..1usize << halving_steps)
        .map(|_| {
            let item = items[rng.random_range(0..items.len())];
            let feature = rng.random_range(1..=d);
            (item, feature)
        })
        .collect()
}

/// Exact spend of a CSH run: `Σ_l |S_(l−1)|·2·τ_l`.
pub fn planned_spend(halving_steps: u32, budget: u64) -> u64 {
    (1..=halving_steps)
        .map(|l| (1u64 << (halving_steps - l + 1)) * 2 * round_draws(budget, halving_steps, l))
        .sum()
}

fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

/// Number of halving steps sufficient for CSH to catch a gap of rank `s`
/// with probability `1 − δ`:
/// `⌈log2(16·d/(α·s)·ln(4·ln(8·|I|·d)/δ))⌉`.
pub fn lemma1_halving_steps(d: usize, alpha: f64, s: usize, set_size: usize, delta: f64) -> Result<u32> {
    if d == 0 || set_size == 0 {
        return Err(domain("d and |I| must be positive"));
    }
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(domain(format!("alpha must lie in (0, 1], got {alpha}")));
    }
    if s == 0 || s > d {
        return Err(domain(format!("s must lie in 1..={d}, got {s}")));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(domain(format!("delta must lie in (0, 1), got {delta}")));
    }
    let inner = 4.0 * (8.0 * set_size as f64 * d as f64).ln() / delta;
    if inner <= 1.0 {
        return Err(domain("log argument must exceed 1"));
    }
    let arg = 16.0 * d as f64 / (alpha * s as f64) * inner.ln();
    ceil_log2(arg)
}

pub(crate) fn ceil_log2(arg: f64) -> Result<u32> {
    if arg <= 1.0 || !arg.is_finite() {
        return Err(domain(format!("log2 argument must exceed 1, got {arg}")));
    }
    let l = arg.log2().ceil();
    if l > f64::from(MAX_HALVING_STEPS) {
        return Err(domain(format!("halving steps {l} exceed {MAX_HALVING_STEPS}")));
    }
    Ok(l as u32)
}

/// Budget sufficient for CSH with `L` halving steps to catch a gap of size
/// `h`: `max(⌈516·L³·2^L/h²⌉, 2^(L+1)·L)`. Saturates at `u64::MAX`.
pub fn lemma1_budget(halving_steps: u32, h: f64) -> Result<u64> {
    if h <= 0.0 || !h.is_finite() {
        return Err(domain(format!("gap h must be positive, got {h}")));
    }
    let l = f64::from(halving_steps);
    let first = (516.0 * l.powi(3) * 2f64.powi(halving_steps as i32) / (h * h)).ceil();
    let first = if first >= u64::MAX as f64 {
        u64::MAX
    } else {
        first as u64
    };
    Ok(first.max(min_budget(halving_steps)))
}
