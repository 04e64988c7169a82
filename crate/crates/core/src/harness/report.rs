//! Aggregated rows and their CSV encoding.

use std::io::{self, Write};

use serde::Serialize;

/// Column order of every report.
pub const CSV_HEADER: &str =
    "experiment,grid_param,n,d,delta,trials,mean_budget,q05_budget,q95_budget,error_rate,emergency_rate,seed";

/// Outcome of one trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrialResult {
    pub budget: u64,
    pub error: bool,
    pub emergency: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRow {
    pub experiment: String,
    pub grid_param: u64,
    pub n: usize,
    pub d: usize,
    pub delta: Option<f64>,
    pub trials: usize,
    pub mean_budget: Option<f64>,
    pub q05_budget: Option<u64>,
    pub q95_budget: Option<u64>,
    pub error_rate: f64,
    pub emergency_rate: f64,
    /// Trials entering the budget statistics (not emergency-stopped).
    pub trials_counted: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub rows: Vec<ReportRow>,
}

impl ExperimentReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(CSV_HEADER);
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.to_csv_line());
            out.push('\n');
        }
        out
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        w.write_all(self.to_csv().as_bytes())
    }

    pub fn find(&self, experiment: &str, grid_param: u64, delta: Option<f64>) -> Option<&ReportRow> {
        self.rows
            .iter()
            .find(|r| r.experiment == experiment && r.grid_param == grid_param && r.delta == delta)
    }
}

/// Empirical quantile by the nearest-rank rule: the `⌈q·N⌉`-th smallest
/// value (at least the first). `sorted` must be ascending.
pub fn nearest_rank(sorted: &[u64], q: f64) -> Option<u64> {
    if sorted.is_empty() {
        return None;
    }
    let rank = ((q * sorted.len() as f64).ceil() as usize).clamp(1, sorted.len());
    Some(sorted[rank - 1])
}

/// `%g`-style rendering with six significant digits.
pub fn format_sig6(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..6).contains(&exp) {
        let mantissa = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        return format!("{mantissa}e{sign}{:02}", exp.abs());
    }
    let decimals = (5 - exp).max(0) as usize;
    trim_zeros(&format!("{x:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn opt<T>(v: Option<T>, f: impl Fn(T) -> String) -> String {
    v.map(f).unwrap_or_default()
}

impl ReportRow {
    /// Aggregates trial results. Emergency-stopped trials count in the error
    /// and emergency rates but not in the budget statistics.
    #[allow(clippy::too_many_arguments)]
    pub fn aggregate(
        experiment: impl Into<String>,
        grid_param: u64,
        n: usize,
        d: usize,
        delta: Option<f64>,
        seed: u64,
        results: &[TrialResult],
    ) -> Self {
        let trials = results.len();
        let mut budgets: Vec<u64> = results.iter().filter(|r| !r.emergency).map(|r| r.budget).collect();
        let mean_budget =
            (!budgets.is_empty()).then(|| budgets.iter().map(|&b| b as f64).sum::<f64>() / budgets.len() as f64);
        budgets.sort_unstable();
        let rate = |count: usize| if trials == 0 { 0.0 } else { count as f64 / trials as f64 };
        ReportRow {
            experiment: experiment.into(),
            grid_param,
            n,
            d,
            delta,
            trials,
            mean_budget,
            q05_budget: nearest_rank(&budgets, 0.05),
            q95_budget: nearest_rank(&budgets, 0.95),
            error_rate: rate(results.iter().filter(|r| r.error).count()),
            emergency_rate: rate(results.iter().filter(|r| r.emergency).count()),
            trials_counted: budgets.len(),
            seed,
        }
    }

    pub fn to_csv_line(&self) -> String {
        [
            self.experiment.clone(),
            self.grid_param.to_string(),
            self.n.to_string(),
            self.d.to_string(),
            opt(self.delta, format_sig6),
            self.trials.to_string(),
            opt(self.mean_budget, format_sig6),
            opt(self.q05_budget, |q| q.to_string()),
            opt(self.q95_budget, |q| q.to_string()),
            format_sig6(self.error_rate),
            format_sig6(self.emergency_rate),
            self.seed.to_string(),
        ]
        .join(",")
    }
}
