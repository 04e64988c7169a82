//! Problem instances, noise models and the metered sampling oracle.
//!
//! The mean matrix is never materialized: an instance stores the two group
//! means and the label vector, so memory is `O(n + d)`. Item and feature
//! indices are 1-based on every public method.

use std::collections::HashMap;

use rand::Rng;
use rand_distr::{Binomial, Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::StreamRng;

/// Default ceiling on the total number of observations of one environment.
pub const DEFAULT_CAP: u64 = 1 << 42;

/// Hidden two-group matrix: row `i` equals `mu_a` when `labels[i] == 0` and
/// `mu_b` otherwise. Item 1 always belongs to group `a`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemInstance {
    mu_a: Vec<f64>,
    mu_b: Vec<f64>,
    labels: Vec<u8>,
}

impl ProblemInstance {
    pub fn new(mu_a: Vec<f64>, mu_b: Vec<f64>, labels: Vec<u8>) -> Result<Self> {
        let inst = Self::new_unchecked(mu_a, mu_b, labels)?;
        if inst.mu_a == inst.mu_b {
            return Err(Error::InvalidInstance(
                "mu_a and mu_b must differ in at least one feature".into(),
            ));
        }
        if inst.labels[0] != 0 {
            return Err(Error::InvalidInstance("item 1 must carry label 0".into()));
        }
        if !inst.labels.contains(&1) {
            return Err(Error::DegenerateLabels);
        }
        Ok(inst)
    }

    /// Builds an instance checking only shapes, value ranges and label
    /// alphabet. Used to simulate inputs that break the two-group
    /// assumption (for instance identical groups).
    pub fn new_unchecked(mu_a: Vec<f64>, mu_b: Vec<f64>, labels: Vec<u8>) -> Result<Self> {
        if mu_a.is_empty() || mu_a.len() != mu_b.len() {
            return Err(Error::InvalidInstance(format!(
                "mean vectors must be non-empty and of equal length (got {} and {})",
                mu_a.len(),
                mu_b.len()
            )));
        }
        if labels.len() < 2 {
            return Err(Error::InvalidInstance("at least two items are required".into()));
        }
        if labels.iter().any(|&g| g > 1) {
            return Err(Error::InvalidInstance("labels must be 0 or 1".into()));
        }
        if mu_a.iter().chain(&mu_b).any(|x| !x.is_finite()) {
            return Err(Error::InvalidInstance("means must be finite".into()));
        }
        Ok(Self { mu_a, mu_b, labels })
    }

    /// Instance with `mu_a = 0` and `mu_b = signal`, the layout used by the
    /// experiments.
    pub fn zero_versus(signal: Vec<f64>, labels: Vec<u8>) -> Result<Self> {
        Self::new(vec![0.0; signal.len()], signal, labels)
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn d(&self) -> usize {
        self.mu_a.len()
    }

    pub fn mu_a(&self) -> &[f64] {
        &self.mu_a
    }

    pub fn mu_b(&self) -> &[f64] {
        &self.mu_b
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    /// Label of item `i` (1-based).
    pub fn label(&self, item: usize) -> u8 {
        self.labels[item - 1]
    }

    /// `M[i, j]`, 1-based.
    pub fn mean(&self, item: usize, feature: usize) -> f64 {
        if self.labels[item - 1] == 0 {
            self.mu_a[feature - 1]
        } else {
            self.mu_b[feature - 1]
        }
    }

    pub fn check_index(&self, item: usize, feature: usize) -> Result<()> {
        if item == 0 || item > self.n() || feature == 0 || feature > self.d() {
            return Err(Error::IndexOutOfRange {
                item,
                feature,
                n: self.n(),
                d: self.d(),
            });
        }
        Ok(())
    }

    pub fn gap_vector(&self) -> Vec<f64> {
        gap_vector(self)
    }

    pub fn balancedness(&self) -> Result<f64> {
        balancedness(&self.labels)
    }

    /// Smallest item index whose row differs from row 1.
    pub fn first_other_item(&self) -> Option<usize> {
        self.labels.iter().position(|&g| g != self.labels[0]).map(|p| p + 1)
    }
}

/// `Δ = mu_a − mu_b`.
pub fn gap_vector(instance: &ProblemInstance) -> Vec<f64> {
    instance.mu_a.iter().zip(&instance.mu_b).map(|(a, b)| a - b).collect()
}

/// Fraction of items in the smaller group.
pub fn balancedness(labels: &[u8]) -> Result<f64> {
    let ones = labels.iter().filter(|&&g| g == 1).count();
    let zeros = labels.len() - ones;
    if ones == 0 || zeros == 0 {
        return Err(Error::DegenerateLabels);
    }
    Ok(ones.min(zeros) as f64 / labels.len() as f64)
}

/// Absolute gaps sorted in decreasing order.
pub fn ordered_gaps(gaps: &[f64]) -> Vec<f64> {
    let mut out: Vec<f64> = gaps.iter().map(|g| g.abs()).collect();
    out.sort_by(|a, b| b.total_cmp(a));
    out
}

/// `n − ones` zeros followed by `ones` ones.
pub fn labels_with_ones(n: usize, ones: usize) -> Vec<u8> {
    (0..n).map(|i| u8::from(i >= n - ones)).collect()
}

/// First half (rounded up) in group `a`, the rest in group `b`.
pub fn balanced_labels(n: usize) -> Vec<u8> {
    labels_with_ones(n, n / 2)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum NoiseModel {
    /// Additive centred Gaussian noise with standard deviation `sigma ≤ 1`.
    Gaussian { sigma: f64 },
    /// `{0, 1}` draws with mean `M[i, j]`.
    Bernoulli,
    /// Noise-free observations.
    Zero,
}

impl NoiseModel {
    pub fn standard_gaussian() -> Self {
        NoiseModel::Gaussian { sigma: 1.0 }
    }

    pub fn validate(&self, instance: &ProblemInstance) -> Result<()> {
        match *self {
            NoiseModel::Gaussian { sigma } if !(sigma > 0.0 && sigma <= 1.0) => Err(Error::InvalidInstance(format!(
                "gaussian sigma must lie in (0, 1], got {sigma}"
            ))),
            NoiseModel::Bernoulli
                if instance
                    .mu_a
                    .iter()
                    .chain(&instance.mu_b)
                    .any(|&m| !(0.0..=1.0).contains(&m)) =>
            {
                Err(Error::InvalidInstance(
                    "bernoulli noise needs every mean in [0, 1]".into(),
                ))
            }
            _ => Ok(()),
        }
    }

    /// Sum of `count` independent observations of a cell with mean `mean`,
    /// drawn from its exact distribution.
    fn draw_sum<R: Rng + ?Sized>(&self, mean: f64, count: u64, rng: &mut R) -> f64 {
        match *self {
            NoiseModel::Zero => mean * count as f64,
            NoiseModel::Gaussian { sigma } => {
                let z: f64 = StandardNormal.sample(rng);
                mean * count as f64 + sigma * (count as f64).sqrt() * z
            }
            NoiseModel::Bernoulli => {
                if count == 1 {
                    f64::from(u8::from(rng.random::<f64>() < mean))
                } else {
                    Binomial::new(count, mean)
                        .expect("mean validated in [0, 1]")
                        .sample(rng) as f64
                }
            }
        }
    }
}

/// Per-cell and total observation counts.
#[derive(Debug, Clone, Default)]
pub struct QueryLedger {
    per_cell: HashMap<(usize, usize), u64>,
    total: u64,
    cap: Option<u64>,
}

impl QueryLedger {
    pub fn with_cap(cap: Option<u64>) -> Self {
        Self { cap, ..Self::default() }
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn cap(&self) -> Option<u64> {
        self.cap
    }

    /// `T_{i,j}`, 1-based.
    pub fn count(&self, item: usize, feature: usize) -> u64 {
        self.per_cell.get(&(item, feature)).copied().unwrap_or(0)
    }

    pub fn cells_touched(&self) -> usize {
        self.per_cell.len()
    }

    /// Sum of the per-cell counters; equal to [`QueryLedger::total`].
    pub fn recount(&self) -> u64 {
        self.per_cell.values().sum()
    }

    fn charge(&mut self, item: usize, feature: usize, count: u64) -> Result<()> {
        if let Some(cap) = self.cap {
            if self.total.checked_add(count).is_none_or(|t| t > cap) {
                return Err(Error::BudgetExhausted {
                    spent: self.total,
                    cap,
                    requested: count,
                });
            }
        }
        *self.per_cell.entry((item, feature)).or_insert(0) += count;
        self.total += count;
        Ok(())
    }
}

/// Sampling oracle: an instance, a noise model, a private noise stream and a
/// ledger charged once per observation.
#[derive(Debug, Clone)]
pub struct Environment {
    instance: ProblemInstance,
    noise: NoiseModel,
    rng: StreamRng,
    ledger: QueryLedger,
}

impl Environment {
    /// New environment with the default cap of `2^42` observations.
    pub fn new(instance: ProblemInstance, noise: NoiseModel, rng: StreamRng) -> Result<Self> {
        noise.validate(&instance)?;
        Ok(Self {
            instance,
            noise,
            rng,
            ledger: QueryLedger::with_cap(Some(DEFAULT_CAP)),
        })
    }

    pub fn with_cap(mut self, cap: Option<u64>) -> Self {
        self.ledger.cap = cap;
        self
    }

    pub fn instance(&self) -> &ProblemInstance {
        &self.instance
    }

    pub fn noise(&self) -> NoiseModel {
        self.noise
    }

    pub fn ledger(&self) -> &QueryLedger {
        &self.ledger
    }

    pub fn n(&self) -> usize {
        self.instance.n()
    }

    pub fn d(&self) -> usize {
        self.instance.d()
    }

    /// One observation of cell `(item, feature)`.
    pub fn sample(&mut self, item: usize, feature: usize) -> Result<f64> {
        self.sample_sum(item, feature, 1)
    }

    /// Sum of `count` fresh observations of one cell. The ledger is charged
    /// `count`; the sum is drawn from its exact law in a single step
    /// (Gaussian for Gaussian noise, binomial for Bernoulli noise).
    pub fn sample_sum(&mut self, item: usize, feature: usize, count: u64) -> Result<f64> {
        self.instance.check_index(item, feature)?;
        self.ledger.charge(item, feature, count)?;
        if count == 0 {
            return Ok(0.0);
        }
        let mean = self.instance.mean(item, feature);
        Ok(self.noise.draw_sum(mean, count, &mut self.rng))
    }

    /// `Σ_t (X_{item,feature}^(t) − X_{1,feature}^(t))` over `count` fresh
    /// paired draws. Row `item` is drawn before row 1.
    pub fn paired_sum(&mut self, item: usize, feature: usize, count: u64) -> Result<f64> {
        self.instance.check_index(item, feature)?;
        if let Some(cap) = self.ledger.cap {
            let need = count.saturating_mul(2);
            if self.ledger.total.checked_add(need).is_none_or(|t| t > cap) {
                return Err(Error::BudgetExhausted {
                    spent: self.ledger.total,
                    cap,
                    requested: need,
                });
            }
        }
        let x = self.sample_sum(item, feature, count)?;
        let y = self.sample_sum(1, feature, count)?;
        Ok(x - y)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SeedPath;

    fn rng(seed: u64) -> StreamRng {
        SeedPath::root(seed).rng()
    }

    fn tiny() -> ProblemInstance {
        ProblemInstance::new(vec![0.0], vec![1.0], vec![0, 1]).unwrap()
    }

    #[test]
    fn zero_noise_returns_mean_and_meters() {
        let mut env = Environment::new(tiny(), NoiseModel::Zero, rng(1)).unwrap();
        assert_eq!(env.ledger().total(), 0);
        assert_eq!(env.sample(2, 1).unwrap(), 1.0);
        assert_eq!(env.ledger().total(), 1);
        assert_eq!(env.ledger().count(2, 1), 1);
    }

    #[test]
    fn cap_is_enforced_on_the_sixth_call() {
        let mut env = Environment::new(tiny(), NoiseModel::Zero, rng(1))
            .unwrap()
            .with_cap(Some(5));
        for _ in 0..5 {
            env.sample(1, 1).unwrap();
        }
        assert!(env.sample(1, 1).unwrap_err().is_budget_exhausted());
        assert_eq!(env.ledger().total(), 5);
    }

    #[test]
    fn paired_sum_refuses_partial_charge() {
        let mut env = Environment::new(tiny(), NoiseModel::Zero, rng(1))
            .unwrap()
            .with_cap(Some(5));
        assert!(env.paired_sum(2, 1, 3).unwrap_err().is_budget_exhausted());
        assert_eq!(env.ledger().total(), 0);
        assert_eq!(env.paired_sum(2, 1, 2).unwrap(), 2.0);
    }

    #[test]
    fn out_of_range_indices() {
        let mut env = Environment::new(tiny(), NoiseModel::Zero, rng(1)).unwrap();
        for (i, j) in [(0, 1), (3, 1), (1, 0), (1, 2)] {
            assert!(matches!(env.sample(i, j), Err(Error::IndexOutOfRange { .. })));
        }
        assert_eq!(env.ledger().total(), 0);
    }

    #[test]
    fn gaussian_draws_are_distinct_and_unbiased() {
        let inst = ProblemInstance::new(vec![0.3, 0.0], vec![1.0, 0.0], vec![0, 1]).unwrap();
        let mut env = Environment::new(inst, NoiseModel::standard_gaussian(), rng(11)).unwrap();
        let a = env.sample(1, 1).unwrap();
        let b = env.sample(1, 1).unwrap();
        assert_ne!(a, b);
        let draws = 100_000;
        let mean = (0..draws).map(|_| env.sample(1, 1).unwrap()).sum::<f64>() / draws as f64;
        assert!((mean - 0.3).abs() < 0.02, "mean {mean}");
    }

    #[test]
    fn noise_kinds_are_unbiased() {
        let inst = ProblemInstance::new(vec![0.25], vec![0.8], vec![0, 1]).unwrap();
        let draws = 100_000u32;
        for (k, noise) in [
            NoiseModel::Gaussian { sigma: 0.5 },
            NoiseModel::Bernoulli,
            NoiseModel::Zero,
        ]
        .into_iter()
        .enumerate()
        {
            let sigma = match noise {
                NoiseModel::Gaussian { sigma } => sigma,
                _ => 1.0,
            };
            let mut env = Environment::new(inst.clone(), noise, rng(100 + k as u64)).unwrap();
            for item in [1, 2] {
                let mean = (0..draws).map(|_| env.sample(item, 1).unwrap()).sum::<f64>() / f64::from(draws);
                let tol = 4.0 * sigma / f64::from(draws).sqrt();
                assert!(
                    (mean - inst.mean(item, 1)).abs() <= tol,
                    "{noise:?} item {item}: {mean}"
                );
            }
        }
    }

    #[test]
    fn bernoulli_batched_sums_match_mean() {
        let inst = ProblemInstance::new(vec![0.25], vec![0.8], vec![0, 1]).unwrap();
        let mut env = Environment::new(inst, NoiseModel::Bernoulli, rng(5)).unwrap();
        let total = (0..1000).map(|_| env.sample_sum(2, 1, 100).unwrap()).sum::<f64>();
        assert!((total / 100_000.0 - 0.8).abs() < 4.0 / 100_000f64.sqrt());
        assert_eq!(env.ledger().total(), 100_000);
    }

    #[test]
    fn same_seed_same_observations() {
        let inst = ProblemInstance::new(vec![0.0, 1.0], vec![1.0, 0.0], vec![0, 1, 1]).unwrap();
        let mut a = Environment::new(inst.clone(), NoiseModel::standard_gaussian(), rng(3)).unwrap();
        let mut b = Environment::new(inst, NoiseModel::standard_gaussian(), rng(3)).unwrap();
        for t in 0..200 {
            let (i, j) = (1 + t % 3, 1 + t % 2);
            assert_eq!(a.sample(i, j).unwrap().to_bits(), b.sample(i, j).unwrap().to_bits());
        }
    }

    #[test]
    fn ledger_total_matches_cells() {
        let inst = ProblemInstance::new(vec![0.0, 1.0], vec![1.0, 0.0], vec![0, 1, 1]).unwrap();
        let mut env = Environment::new(inst, NoiseModel::standard_gaussian(), rng(3)).unwrap();
        env.sample_sum(2, 2, 7).unwrap();
        env.paired_sum(3, 1, 4).unwrap();
        env.sample(1, 2).unwrap();
        assert_eq!(env.ledger().total(), 7 + 8 + 1);
        assert_eq!(env.ledger().recount(), env.ledger().total());
        assert_eq!(env.ledger().count(1, 1), 4);
    }

    #[test]
    fn instance_validation() {
        assert!(matches!(
            ProblemInstance::new(vec![0.5, 0.5], vec![0.5, 0.5], vec![0, 1]),
            Err(Error::InvalidInstance(_))
        ));
        assert!(matches!(
            ProblemInstance::new(vec![0.0], vec![1.0], vec![1, 0]),
            Err(Error::InvalidInstance(_))
        ));
        assert!(matches!(
            ProblemInstance::new(vec![0.0], vec![1.0], vec![0, 0]),
            Err(Error::DegenerateLabels)
        ));
        assert!(ProblemInstance::new(vec![0.0], vec![1.0, 2.0], vec![0, 1]).is_err());
        let out_of_range = ProblemInstance::new(vec![0.0], vec![1.5], vec![0, 1]).unwrap();
        assert!(Environment::new(out_of_range.clone(), NoiseModel::Bernoulli, rng(0)).is_err());
        assert!(Environment::new(out_of_range, NoiseModel::Gaussian { sigma: 1.5 }, rng(0)).is_err());
    }

    #[test]
    fn gap_vector_examples() {
        let inst = ProblemInstance::new(vec![0.0, 0.0], vec![1.0, 0.0], vec![0, 1]).unwrap();
        assert_eq!(inst.gap_vector(), vec![-1.0, 0.0]);
        let s = 4usize;
        let mut signal = vec![0.0; 1000];
        signal[..s].fill(15.0 / (s as f64).sqrt());
        let inst = ProblemInstance::zero_versus(signal, balanced_labels(20)).unwrap();
        let gap = inst.gap_vector();
        assert!(gap[..4].iter().all(|&g| g == -7.5));
        assert!(gap[4..].iter().all(|&g| g == 0.0));
    }

    #[test]
    fn balancedness_examples() {
        assert_eq!(balancedness(&balanced_labels(20)).unwrap(), 0.5);
        assert_eq!(balancedness(&[0, 1, 1, 1]).unwrap(), 0.25);
        assert_eq!(balancedness(&[0, 1]).unwrap(), 0.5);
        assert_eq!(balancedness(&[0, 0, 0]), Err(Error::DegenerateLabels));
    }

    #[test]
    fn ordered_gaps_examples() {
        assert_eq!(ordered_gaps(&[0.0, 3.0, -4.0]), vec![4.0, 3.0, 0.0]);
        assert_eq!(ordered_gaps(&[1.0, 1.0]), vec![1.0, 1.0]);
        let mut tilde = vec![0.0; 1000];
        tilde[..10].fill(5.0);
        let sorted = ordered_gaps(&tilde);
        assert!(sorted[..10].iter().all(|&g| g == 5.0));
        assert!(sorted[10..].iter().all(|&g| g == 0.0));
    }
}
