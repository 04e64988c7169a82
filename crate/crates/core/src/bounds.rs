//! Closed-form complexity and lower-bound calculators. All logarithms are
//! natural.

use serde::Serialize;

use crate::env::ordered_gaps;
use crate::error::{Error, Result};

fn sorted_nonzero(gaps: &[f64]) -> Result<Vec<f64>> {
    let sorted = ordered_gaps(gaps);
    if sorted.first().is_none_or(|&g| g == 0.0) {
        return Err(Error::ZeroGap);
    }
    Ok(sorted)
}

/// `(s*, max_s s·Δ_(s)²)` with the smallest maximizer on ties; `s*` is
/// 1-based.
fn sparsity_profile(sorted: &[f64]) -> (usize, f64) {
    let mut best = (1, f64::NEG_INFINITY);
    for (idx, g) in sorted.iter().enumerate() {
        let value = (idx + 1) as f64 * g * g;
        if value > best.1 {
            best = (idx + 1, value);
        }
    }
    best
}

/// Effective sparsity `s* = argmax_s s·Δ_(s)²`.
pub fn effective_sparsity(gaps: &[f64]) -> Result<usize> {
    Ok(sparsity_profile(&sorted_nonzero(gaps)?).0)
}

/// `(max_s s·Δ_(s)², ‖Δ‖², ln(2d)·max_s s·Δ_(s)²)` where `d = gaps.len()`.
///
/// The upper inequality only holds for `d ≥ 2`.
pub fn sandwich_check(gaps: &[f64]) -> Result<(f64, f64, f64)> {
    let sorted = sorted_nonzero(gaps)?;
    let (_, left) = sparsity_profile(&sorted);
    let mid = gaps.iter().map(|g| g * g).sum::<f64>();
    let right = (2.0 * gaps.len() as f64).ln() * left;
    Ok((left, mid, right))
}

fn check_theta(theta: f64, n: usize) -> Result<()> {
    let lo = 1.0 / n as f64;
    if !(theta >= lo - 1e-12 && theta <= 0.5 + 1e-12) {
        return Err(Error::Domain(format!("theta must lie in [1/n, 1/2], got {theta}")));
    }
    Ok(())
}

/// Instance complexity
/// `(d/θ)(1/‖Δ‖² + 1/s*) + min_s (d/s + n)(1/Δ_(s)² + 1)`,
/// the minimum ranging over the support of `Δ`.
pub fn complexity_h(gaps: &[f64], theta: f64, n: usize) -> Result<f64> {
    check_theta(theta, n)?;
    let sorted = sorted_nonzero(gaps)?;
    let d = gaps.len() as f64;
    let (s_star, _) = sparsity_profile(&sorted);
    let norm2 = gaps.iter().map(|g| g * g).sum::<f64>();
    let detect = d / theta * (1.0 / norm2 + 1.0 / s_star as f64);
    let trade_off = sorted
        .iter()
        .take_while(|&&g| g > 0.0)
        .enumerate()
        .map(|(idx, g)| (d / (idx + 1) as f64 + n as f64) * (1.0 / (g * g) + 1.0))
        .fold(f64::INFINITY, f64::min);
    Ok(detect + trade_off)
}

/// Budget that any δ-PAC algorithm exceeds with probability at least `δ`
/// on some row/column permutation of the instance:
/// `max(2(n−2)/Δ_(1)²·ln(1/(4.8δ)), 2d/(θ‖Δ‖²)·ln(1/(6δ)))`.
pub fn lower_bound_quantile(gaps: &[f64], theta: f64, n: usize, delta: f64) -> Result<f64> {
    if !(delta > 0.0 && delta < 0.25) {
        return Err(Error::Domain(format!("delta must lie in (0, 1/4), got {delta}")));
    }
    if n < 3 {
        return Err(Error::Domain(format!("need n >= 3, got {n}")));
    }
    check_theta(theta, n)?;
    let sorted = sorted_nonzero(gaps)?;
    let d = gaps.len() as f64;
    let norm2 = gaps.iter().map(|g| g * g).sum::<f64>();
    let items = 2.0 * (n as f64 - 2.0) / (sorted[0] * sorted[0]) * (1.0 / (4.8 * delta)).ln();
    let features = 2.0 * d / (theta * norm2) * (1.0 / (6.0 * delta)).ln();
    Ok(items.max(features))
}

/// Two-valued gap bound `d/(θ‖Δ‖²) + n/h²` for `Δ ∈ {0, h}^d` with
/// `support` nonzero entries.
pub fn corollary1_bound(h: f64, support: usize, theta: f64, n: usize, d: usize) -> Result<f64> {
    if !(h > 0.0 && h < 1.0) {
        return Err(Error::Domain(format!("h must lie in (0, 1), got {h}")));
    }
    if support == 0 || support > d {
        return Err(Error::Domain(format!("support must lie in 1..={d}, got {support}")));
    }
    check_theta(theta, n)?;
    let norm2 = support as f64 * h * h;
    Ok(d as f64 / (theta * norm2) + n as f64 / (h * h))
}

/// `s̃ = s* ∨ (⌈d/n⌉ ∧ |supp Δ|)`; informational only.
pub fn s_tilde(gaps: &[f64], n: usize) -> Result<usize> {
    let s_star = effective_sparsity(gaps)?;
    let support = gaps.iter().filter(|&&g| g != 0.0).count();
    Ok(s_star.max(gaps.len().div_ceil(n).min(support)))
}

/// `Some((h, support))` when every nonzero `|Δ_j|` equals the same `h`.
pub fn two_valued(gaps: &[f64]) -> Option<(f64, usize)> {
    let mut nonzero = gaps.iter().filter(|&&g| g != 0.0).map(|g| g.abs());
    let h = nonzero.next()?;
    let rest: Vec<f64> = nonzero.collect();
    rest.iter().all(|&g| g == h).then_some((h, rest.len() + 1))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Sandwich {
    pub left: f64,
    pub mid: f64,
    pub right: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundsReport {
    pub n: usize,
    pub d: usize,
    pub theta: f64,
    pub delta: f64,
    pub h_complexity: f64,
    pub s_star: usize,
    pub s_tilde: usize,
    pub sandwich: Sandwich,
    pub lb_quantile: Option<f64>,
    pub corollary_bound: Option<f64>,
}

impl BoundsReport {
    /// `lb_quantile` is `None` when `δ ∉ (0, 1/4)` or `n < 3`;
    /// `corollary_bound` is `None` unless `Δ` is two-valued with `h < 1`.
    pub fn compute(gaps: &[f64], theta: f64, n: usize, delta: f64) -> Result<Self> {
        let (left, mid, right) = sandwich_check(gaps)?;
        let corollary_bound = match two_valued(gaps) {
            Some((h, support)) if h < 1.0 => Some(corollary1_bound(h, support, theta, n, gaps.len())?),
            _ => None,
        };
        let lb_quantile = if delta > 0.0 && delta < 0.25 && n >= 3 {
            Some(lower_bound_quantile(gaps, theta, n, delta)?)
        } else {
            None
        };
        Ok(Self {
            n,
            d: gaps.len(),
            theta,
            delta,
            h_complexity: complexity_h(gaps, theta, n)?,
            s_star: effective_sparsity(gaps)?,
            s_tilde: s_tilde(gaps, n)?,
            sandwich: Sandwich { left, mid, right },
            lb_quantile,
            corollary_bound,
        })
    }
}
