//! Benchmark runner: synthetic recovery experiments with CSV outputs.
//!
//! Three subcommands, one per experiment:
//!
//! - `bench table1`: recovery quality of three estimators on a noisy sparse
//!   rank-one signal, averaged over trials;
//! - `bench figure`: cost to reach a common accuracy target, comparing the
//!   variance-reduced solver against two conditional-gradient baselines;
//! - `bench sweep-lambda`: the table's full recovery method across a grid of
//!   penalty weights.
//!
//! Options are resolved in three layers: experiment defaults, then a
//! `key = value` config file (`--config`), then explicit CLI flags. Every
//! run writes CSV files into `--out`; reruns with the same settings produce
//! byte-identical files unless `--measure-time` is on.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use svrgcg::bench::{run_experiment, ExperimentConfig, ExperimentKind};

#[derive(Parser)]
#[command(
    name = "bench",
    about = "Synthetic low-rank recovery benchmarks with CSV reports",
    version
)]
struct Cli {
    #[command(subcommand)]
    experiment: Experiment,
}

#[derive(Subcommand)]
enum Experiment {
    /// Recovery-quality table: plain SVD, low-rank projection, and the
    /// low-rank-plus-sparse composite method on the same noisy instances.
    Table1(CommonArgs),
    /// Cost-to-accuracy comparison against the conditional-gradient
    /// baselines (per-iteration traces included).
    Figure(CommonArgs),
    /// Penalty-weight sweep of the composite method.
    SweepLambda(CommonArgs),
}

/// Flags shared by all experiments. Every option is optional; unset flags
/// fall back to the config file and then to the experiment's defaults.
#[derive(Args)]
struct CommonArgs {
    /// Directory the CSV reports are written into (created if missing).
    #[arg(long, value_name = "DIR")]
    out: PathBuf,

    /// `key = value` config file applied before the CLI flags.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Output format (only `csv` is supported).
    #[arg(long, default_value = "csv")]
    format: String,

    /// Matrix dimension d (the variable is d×d).
    #[arg(long)]
    d: Option<usize>,

    /// Planted signal rank.
    #[arg(long)]
    rank: Option<usize>,

    /// l1 penalty weight λ.
    #[arg(long)]
    lambda: Option<f64>,

    /// Table noise magnitude c.
    #[arg(long)]
    c: Option<f64>,

    /// Sampling-oracle noise scale (figure experiment).
    #[arg(long)]
    noise_sigma: Option<f64>,

    /// Number of independent trials.
    #[arg(long)]
    trials: Option<usize>,

    /// Accuracy target as a fraction of the planted signal's squared norm.
    #[arg(long)]
    epsilon_rel: Option<f64>,

    /// Base seed; each trial derives a fixed substream from it.
    #[arg(long)]
    seed: Option<u64>,

    /// Rank budget of the weak proximal oracle.
    #[arg(long)]
    prox_rank: Option<usize>,

    /// Comma-separated penalty weights for the sweep.
    #[arg(long, value_name = "W1,W2,...")]
    lambdas: Option<String>,

    /// Iteration budget of the conditional-gradient baseline.
    #[arg(long)]
    scg_iterations: Option<u64>,

    /// Outer-iteration budget of the sliding baseline.
    #[arg(long)]
    scgs_iterations: Option<u64>,

    /// Record real wall-clock seconds in the CSV `seconds` columns
    /// (sacrifices byte-identical reruns).
    #[arg(long)]
    measure_time: bool,
}

impl CommonArgs {
    /// Defaults ← config file ← CLI flags, in that precedence order.
    fn resolve(&self, kind: ExperimentKind) -> svrgcg::Result<ExperimentConfig> {
        if self.format != "csv" {
            return Err(svrgcg::Error::Config(format!(
                "unsupported output format {:?} (only \"csv\")",
                self.format
            )));
        }
        let mut cfg = match kind {
            ExperimentKind::Table1 => ExperimentConfig::table1_defaults(),
            ExperimentKind::Figure => ExperimentConfig::figure_defaults(),
            ExperimentKind::SweepLambda => ExperimentConfig::sweep_defaults(),
        };
        if let Some(path) = &self.config {
            cfg.apply_file(path)?;
        }
        let overrides: [(&str, Option<String>); 11] = [
            ("d", self.d.map(|v| v.to_string())),
            ("rank", self.rank.map(|v| v.to_string())),
            ("lambda", self.lambda.map(|v| v.to_string())),
            ("c", self.c.map(|v| v.to_string())),
            ("noise_sigma", self.noise_sigma.map(|v| v.to_string())),
            ("trials", self.trials.map(|v| v.to_string())),
            ("epsilon_rel", self.epsilon_rel.map(|v| v.to_string())),
            ("seed", self.seed.map(|v| v.to_string())),
            ("prox_rank", self.prox_rank.map(|v| v.to_string())),
            ("lambdas", self.lambdas.clone()),
            (
                "scg_iterations",
                self.scg_iterations.map(|v| v.to_string()),
            ),
        ];
        for (key, value) in overrides {
            if let Some(value) = value {
                cfg.apply(key, &value)?;
            }
        }
        if let Some(v) = self.scgs_iterations {
            cfg.apply("scgs_iterations", &v.to_string())?;
        }
        if self.measure_time {
            cfg.apply("measure_time", "true")?;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (kind, args) = match &cli.experiment {
        Experiment::Table1(args) => (ExperimentKind::Table1, args),
        Experiment::Figure(args) => (ExperimentKind::Figure, args),
        Experiment::SweepLambda(args) => (ExperimentKind::SweepLambda, args),
    };
    match args.resolve(kind).and_then(|cfg| {
        let outcome = run_experiment(&cfg, &args.out)?;
        Ok((cfg, outcome))
    }) {
        Ok((cfg, outcome)) => {
            println!(
                "{}: wrote {} to {}",
                cfg.experiment.name(),
                if outcome.sweep.is_some() {
                    "sweep.csv"
                } else {
                    "metrics.csv, trials_*.csv, trace_*.csv"
                },
                args.out.display()
            );
            for row in &outcome.metrics {
                println!(
                    "  {}: {}/{} trials ok, relative_error {:.3e}, rank {:.2}",
                    row.method, row.trials_ok, cfg.trials, row.relative_error, row.rank
                );
            }
            if let Some(sweep) = &outcome.sweep {
                for row in sweep {
                    println!(
                        "  lambda {:>8.3}: {}/{} trials ok, relative_error {:.3e}",
                        row.lambda, row.metrics.trials_ok, cfg.trials, row.metrics.relative_error
                    );
                }
            }
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("bench: {err}");
            ExitCode::FAILURE
        }
    }
}
