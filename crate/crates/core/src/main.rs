use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use banditclust::bounds::BoundsReport;
use banditclust::env::{balanced_labels, labels_with_ones, Environment, NoiseModel, ProblemInstance};
use banditclust::harness::{run_trials_with, ExperimentConfig, ExperimentKind, CSV_HEADER};
use banditclust::pipeline::{bandit_clustering, default_cap, PipelineOutcome};
use banditclust::rng::{tag, SeedPath};
use banditclust::Error;

const EXIT_FAILURE: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_BUDGET: u8 = 3;

#[derive(Parser)]
#[command(
    name = "banditclust",
    version,
    about = "Adaptive two-group clustering by sequential entry queries"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full pipeline once and print the outcome as JSON.
    Cluster(ClusterArgs),
    /// Run the sparsity sweep and write a CSV report.
    Exp1(ExperimentArgs),
    /// Run the item-count sweep and write a CSV report.
    Exp2(ExperimentArgs),
    /// Run whatever experiment the config names.
    Run(ExperimentArgs),
    /// Print complexity and lower-bound quantities as JSON.
    Bounds(BoundsArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum NoiseArg {
    Gaussian,
    Bernoulli,
    Zero,
}

impl From<NoiseArg> for NoiseModel {
    fn from(arg: NoiseArg) -> Self {
        match arg {
            NoiseArg::Gaussian => NoiseModel::standard_gaussian(),
            NoiseArg::Bernoulli => NoiseModel::Bernoulli,
            NoiseArg::Zero => NoiseModel::Zero,
        }
    }
}

#[derive(Args)]
struct ClusterArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    d: usize,
    /// Gap vector: a file or an inline comma-separated list of `d` numbers.
    #[arg(long)]
    gaps: String,
    /// `auto` (balanced), a fraction in (0, 1/2], a file or an inline list of 0/1 labels.
    #[arg(long, default_value = "auto")]
    theta_labels: String,
    #[arg(long, default_value_t = 0.1)]
    delta: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Ledger cap; per-instance default when absent.
    #[arg(long)]
    cap: Option<u64>,
    #[arg(long, value_enum, default_value_t = NoiseArg::Gaussian)]
    noise: NoiseArg,
    /// Mean of every entry of group `b`; group `a` adds the gaps to it.
    #[arg(long, default_value_t = 0.0)]
    baseline_mean: f64,
}

#[derive(Args)]
struct ExperimentArgs {
    #[arg(long)]
    config: PathBuf,
    /// CSV destination; the config's `output`, else stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct BoundsArgs {
    #[arg(long)]
    gaps: String,
    #[arg(long)]
    theta: f64,
    #[arg(long)]
    n: usize,
    /// Checked against the gap vector length when given.
    #[arg(long)]
    d: Option<usize>,
    #[arg(long, default_value_t = 0.1)]
    delta: f64,
}

#[derive(Serialize)]
struct ClusterReport {
    n: usize,
    d: usize,
    delta: f64,
    seed: u64,
    cap: u64,
    correct: bool,
    #[serde(flatten)]
    outcome: PipelineOutcome,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Cluster(args) => cluster(args),
        Command::Exp1(args) => experiment(args, Some(ExperimentKind::Exp1)),
        Command::Exp2(args) => experiment(args, Some(ExperimentKind::Exp2)),
        Command::Run(args) => experiment(args, None),
        Command::Bounds(args) => bounds(args),
    };
    match result {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(match err {
                Error::Config(_) | Error::InvalidInstance(_) | Error::Domain(_) | Error::DegenerateLabels => {
                    EXIT_CONFIG
                }
                Error::BudgetExhausted { .. } => EXIT_BUDGET,
                _ => EXIT_FAILURE,
            })
        }
    }
}

fn parse_list(spec: &str, what: &str) -> banditclust::Result<Vec<f64>> {
    let text = if Path::new(spec).is_file() {
        std::fs::read_to_string(spec).map_err(|e| Error::Config(format!("{spec}: {e}")))?
    } else {
        spec.to_string()
    };
    text.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse::<f64>()
                .map_err(|_| Error::Config(format!("{what}: cannot parse {t:?}")))
        })
        .collect()
}

fn parse_labels(spec: &str, n: usize) -> banditclust::Result<Vec<u8>> {
    if spec == "auto" {
        return Ok(balanced_labels(n));
    }
    if !Path::new(spec).is_file() && !spec.contains(',') {
        if let Ok(theta) = spec.parse::<f64>() {
            if !(theta > 0.0 && theta <= 0.5) {
                return Err(Error::Config(format!("theta must lie in (0, 1/2], got {theta}")));
            }
            let ones = ((theta * n as f64).round() as usize).max(1);
            return Ok(labels_with_ones(n, ones));
        }
    }
    let values = parse_list(spec, "labels")?;
    if values.len() != n {
        return Err(Error::Config(format!("expected {n} labels, got {}", values.len())));
    }
    values
        .into_iter()
        .map(|v| match v {
            0.0 => Ok(0),
            1.0 => Ok(1),
            _ => Err(Error::Config(format!("labels must be 0 or 1, got {v}"))),
        })
        .collect()
}

fn cluster(args: ClusterArgs) -> banditclust::Result<ExitCode> {
    let gaps = parse_list(&args.gaps, "gaps")?;
    if gaps.len() != args.d {
        return Err(Error::Config(format!("expected {} gaps, got {}", args.d, gaps.len())));
    }
    let labels = parse_labels(&args.theta_labels, args.n)?;
    let mu_b = vec![args.baseline_mean; args.d];
    let mu_a = mu_b.iter().zip(&gaps).map(|(b, g)| b + g).collect();
    let instance = ProblemInstance::new(mu_a, mu_b, labels)?;
    let cap = args.cap.unwrap_or_else(|| default_cap(&instance));
    let path = SeedPath::root(args.seed);
    let mut env =
        Environment::new(instance.clone(), args.noise.into(), path.child(tag::NOISE).rng())?.with_cap(Some(cap));
    let outcome = bandit_clustering(&mut env, args.delta, &mut path.child(tag::ALGORITHM).rng())?;
    let exhausted = outcome.emergency_stopped;
    let report = ClusterReport {
        n: args.n,
        d: args.d,
        delta: args.delta,
        seed: args.seed,
        cap,
        correct: outcome.is_correct(instance.labels()),
        outcome,
    };
    print_json(&report)?;
    Ok(if exhausted {
        ExitCode::from(EXIT_BUDGET)
    } else {
        ExitCode::SUCCESS
    })
}

fn experiment(args: ExperimentArgs, kind: Option<ExperimentKind>) -> banditclust::Result<ExitCode> {
    let mut cfg = ExperimentConfig::from_path(&args.config)?;
    if let Some(kind) = kind {
        if cfg.experiment != kind {
            return Err(Error::Config(format!(
                "config describes {}, not {}",
                cfg.experiment.name(),
                kind.name()
            )));
        }
    }
    if let Some(trials) = args.trials {
        cfg.trials = trials;
    }
    if let Some(seed) = args.seed {
        cfg.master_seed = seed;
    }
    cfg.validate()?;

    let io_err = |e: io::Error| Error::Config(format!("writing report: {e}"));
    let out: Box<dyn Write> = match args.out.or_else(|| cfg.output.clone()) {
        Some(path) => Box::new(File::create(&path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?),
        None => Box::new(io::stdout().lock()),
    };
    let mut out = BufWriter::new(out);
    writeln!(out, "{CSV_HEADER}").map_err(io_err)?;
    out.flush().map_err(io_err)?;
    let mut write_failure = None;
    run_trials_with(&cfg, |row| {
        if write_failure.is_none() {
            if let Err(e) = writeln!(out, "{}", row.to_csv_line()).and_then(|_| out.flush()) {
                write_failure = Some(e);
            }
        }
    })?;
    match write_failure {
        Some(e) => Err(io_err(e)),
        None => Ok(ExitCode::SUCCESS),
    }
}

fn bounds(args: BoundsArgs) -> banditclust::Result<ExitCode> {
    let gaps = parse_list(&args.gaps, "gaps")?;
    if let Some(d) = args.d.filter(|&d| d != gaps.len()) {
        return Err(Error::Config(format!("expected {d} gaps, got {}", gaps.len())));
    }
    let report = BoundsReport::compute(&gaps, args.theta, args.n, args.delta)?;
    print_json(&report)?;
    Ok(ExitCode::SUCCESS)
}

fn print_json<T: Serialize>(value: &T) -> banditclust::Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Error::Config(e.to_string()))?;
    println!("{text}");
    Ok(())
}
