//! Non-adaptive baseline: sample every cell `τ = ⌊T/(n·d)⌋` times, then split
//! the row averages with 2-means.

use rand::Rng;
use serde::Serialize;

use crate::env::Environment;
use crate::error::{Error, Result};

pub const DEFAULT_RESTARTS: usize = 10;
pub const MAX_LLOYD_ITERATIONS: usize = 100;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BaselineOutcome {
    pub labels: Vec<u8>,
    pub budget_used: u64,
    pub tau: u64,
    pub kmeans_iterations: usize,
}

/// Result of one Lloyd run.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoMeansFit {
    pub assignment: Vec<u8>,
    /// Within-cluster sum of squares after each assignment step.
    pub objective_trace: Vec<f64>,
    pub iterations: usize,
}

impl TwoMeansFit {
    pub fn objective(&self) -> f64 {
        *self.objective_trace.last().expect("at least one assignment step")
    }
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Lloyd iterations for two clusters over the rows of `points` (row-major,
/// `dim` columns), started from rows `init.0` and `init.1`. Stops when the
/// assignment no longer changes or after [`MAX_LLOYD_ITERATIONS`]. An
/// emptied cluster keeps its previous centre.
pub fn lloyd_two_means(points: &[f64], dim: usize, init: (usize, usize)) -> TwoMeansFit {
    let rows = points.len() / dim;
    let row = |i: usize| &points[i * dim..(i + 1) * dim];
    let mut centers = [row(init.0).to_vec(), row(init.1).to_vec()];
    let mut assignment: Vec<u8> = Vec::new();
    let mut objective_trace = Vec::new();
    let mut iterations = 0;

    while iterations < MAX_LLOYD_ITERATIONS {
        iterations += 1;
        let mut objective = 0.0;
        let next: Vec<u8> = (0..rows)
            .map(|i| {
                let d0 = sq_dist(row(i), &centers[0]);
                let d1 = sq_dist(row(i), &centers[1]);
                objective += d0.min(d1);
                u8::from(d1 < d0)
            })
            .collect();
        objective_trace.push(objective);
        let changed = next != assignment;
        assignment = next;
        if !changed {
            break;
        }
        for (c, center) in centers.iter_mut().enumerate() {
            let members: Vec<usize> = (0..rows).filter(|&i| assignment[i] == c as u8).collect();
            if members.is_empty() {
                continue;
            }
            center.fill(0.0);
            for &i in &members {
                for (acc, x) in center.iter_mut().zip(row(i)) {
                    *acc += x;
                }
            }
            let inv = 1.0 / members.len() as f64;
            center.iter_mut().for_each(|x| *x *= inv);
        }
    }
    TwoMeansFit {
        assignment,
        objective_trace,
        iterations,
    }
}

/// Flips a two-cluster assignment so that the first row gets label 0.
pub fn canonicalize(mut labels: Vec<u8>) -> Vec<u8> {
    if labels.first() == Some(&1) {
        labels.iter_mut().for_each(|g| *g ^= 1);
    }
    labels
}

/// Best of `restarts` Lloyd runs, each started from a uniformly drawn pair of
/// distinct rows; the lowest final objective wins, earliest restart on ties.
pub fn two_means<R: Rng + ?Sized>(points: &[f64], dim: usize, restarts: usize, rng: &mut R) -> TwoMeansFit {
    let rows = points.len() / dim;
    assert!(rows >= 2, "two-means needs at least two rows");
    let mut best: Option<TwoMeansFit> = None;
    for _ in 0..restarts.max(1) {
        let a = rng.random_range(0..rows);
        let mut b = rng.random_range(0..rows - 1);
        if b >= a {
            b += 1;
        }
        let fit = lloyd_two_means(points, dim, (a, b));
        if best.as_ref().is_none_or(|cur| fit.objective() < cur.objective()) {
            best = Some(fit);
        }
    }
    best.expect("at least one restart")
}

/// Uniform sampling followed by 2-means on the row averages.
pub fn uniform_kmeans<R: Rng + ?Sized>(
    env: &mut Environment,
    budget: u64,
    restarts: usize,
    rng: &mut R,
) -> Result<BaselineOutcome> {
    let (n, d) = (env.n(), env.d());
    let cells = (n * d) as u64;
    let tau = budget / cells;
    if tau == 0 {
        return Err(Error::InsufficientBudget { budget, cells });
    }
    let start = env.ledger().total();
    let mut averages = Vec::with_capacity(n * d);
    for i in 1..=n {
        for j in 1..=d {
            averages.push(env.sample_sum(i, j, tau)? / tau as f64);
        }
    }
    let fit = two_means(&averages, d, restarts, rng);
    Ok(BaselineOutcome {
        labels: canonicalize(fit.assignment),
        budget_used: env.ledger().total() - start,
        tau,
        kmeans_iterations: fit.iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::{NoiseModel, ProblemInstance};
    use crate::rng::SeedPath;

    #[test]
    fn tau_is_floor() {
        let mut signal = vec![0.0; 1000];
        signal[0] = 15.0;
        let inst = ProblemInstance::zero_versus(signal, crate::env::balanced_labels(20)).unwrap();
        let mut env = Environment::new(inst, NoiseModel::standard_gaussian(), SeedPath::root(1).rng()).unwrap();
        let out = uniform_kmeans(&mut env, 300_000, 4, &mut SeedPath::root(2).rng()).unwrap();
        assert_eq!(out.tau, 15);
        assert_eq!(out.budget_used, 20 * 1000 * 15);
        assert_eq!(env.ledger().total(), out.budget_used);
        assert_eq!(out.labels, crate::env::balanced_labels(20));
    }

    #[test]
    fn insufficient_budget() {
        let inst = ProblemInstance::new(vec![0.0, 0.0], vec![1.0, 0.0], vec![0, 1, 1]).unwrap();
        let mut env = Environment::new(inst, NoiseModel::Zero, SeedPath::root(1).rng()).unwrap();
        assert!(matches!(
            uniform_kmeans(&mut env, 5, 3, &mut SeedPath::root(2).rng()),
            Err(Error::InsufficientBudget { budget: 5, cells: 6 })
        ));
    }

    #[test]
    fn zero_noise_recovers_labels() {
        let labels = vec![0, 1, 1, 0, 1, 0, 0];
        let inst = ProblemInstance::new(vec![0.2, 0.4, 0.1], vec![0.2, 0.5, 0.1], labels.clone()).unwrap();
        for seed in 0..10 {
            let mut env = Environment::new(inst.clone(), NoiseModel::Zero, SeedPath::root(seed).rng()).unwrap();
            let out = uniform_kmeans(&mut env, 21, 8, &mut SeedPath::root(seed).child(1).rng()).unwrap();
            assert_eq!(out.labels, labels);
        }
    }

    #[test]
    fn canonicalization_is_swap_invariant() {
        let a = vec![0, 1, 1, 0];
        let b: Vec<u8> = a.iter().map(|g| g ^ 1).collect();
        assert_eq!(canonicalize(a.clone()), canonicalize(b));
        assert_eq!(canonicalize(a.clone()), a);
    }
}
