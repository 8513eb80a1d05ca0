//! Experiment configuration: defaults per experiment, plain-text
//! `key = value` config files, and a single override path shared by file
//! parsing and CLI flags (so the CLI always wins over the file).

use std::collections::BTreeSet;
use std::path::Path;

use crate::error::{Error, Result};

/// Which synthetic experiment to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    /// Recovery-quality table: three methods on a noisy sparse rank-one
    /// signal, averaged over trials.
    Table1,
    /// Cost-to-accuracy comparison of the variance-reduced solver against
    /// the two conditional-gradient baselines.
    Figure,
    /// Penalty-weight sweep of the full recovery method on the table
    /// instance.
    SweepLambda,
}

impl ExperimentKind {
    pub fn name(&self) -> &'static str {
        match self {
            ExperimentKind::Table1 => "table1",
            ExperimentKind::Figure => "figure",
            ExperimentKind::SweepLambda => "sweep-lambda",
        }
    }
}

/// Full description of one benchmark run.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    /// Matrix dimension d (the variable is d×d).
    pub d: usize,
    /// Signal rank r (columns of the planted factor).
    pub r: usize,
    /// l1 penalty weight λ.
    pub lambda: f64,
    /// Table noise magnitude c in M = yyᵀ + (c/2)(N + Nᵀ).
    pub noise_c: f64,
    /// Sampling-oracle noise scale for the figure experiment.
    pub noise_sigma: f64,
    pub trials: usize,
    /// Accuracy target as a fraction of ‖YYᵀ‖²_F.
    pub epsilon_rel: f64,
    /// Base seed; every trial derives its own substream.
    pub seed: u64,
    /// Rank budget of the weak proximal oracle (None picks the experiment
    /// default: the signal rank for the figure, a small constant for the
    /// table).
    pub prox_rank: Option<usize>,
    /// Penalty weights for the sweep experiment.
    pub lambdas: Vec<f64>,
    /// Iteration budgets for the baselines in the figure experiment.
    pub scg_iterations: u64,
    pub scgs_iterations: u64,
    /// Record real wall-clock seconds (off keeps outputs byte-identical
    /// across reruns).
    pub measure_time: bool,
}

impl ExperimentConfig {
    pub fn table1_defaults() -> Self {
        ExperimentConfig {
            experiment: ExperimentKind::Table1,
            d: 50,
            r: 1,
            lambda: 2.0,
            noise_c: 0.5,
            noise_sigma: 0.0,
            trials: 50,
            epsilon_rel: 0.01,
            seed: 7,
            prox_rank: None,
            lambdas: vec![0.5, 1.0, 2.0, 4.0, 8.0],
            scg_iterations: 10_000,
            scgs_iterations: 300,
            measure_time: false,
        }
    }

    pub fn figure_defaults() -> Self {
        ExperimentConfig {
            experiment: ExperimentKind::Figure,
            d: 300,
            r: 1,
            lambda: 2.0,
            noise_c: 0.0,
            noise_sigma: 5.0,
            trials: 30,
            epsilon_rel: 0.01,
            seed: 7,
            prox_rank: None,
            lambdas: Vec::new(),
            scg_iterations: 10_000,
            scgs_iterations: 300,
            measure_time: false,
        }
    }

    pub fn sweep_defaults() -> Self {
        ExperimentConfig {
            experiment: ExperimentKind::SweepLambda,
            ..ExperimentConfig::table1_defaults()
        }
    }

    /// Applies one `key = value` override; both the config-file parser and
    /// the CLI go through here so they accept identical keys.
    pub fn apply(&mut self, key: &str, value: &str) -> Result<()> {
        let parse_err = |what: &str| {
            Error::Config(format!("could not parse {key} = {value:?} as {what}"))
        };
        match key {
            "d" => self.d = value.parse().map_err(|_| parse_err("a dimension"))?,
            "r" | "rank" => self.r = value.parse().map_err(|_| parse_err("a rank"))?,
            "lambda" => self.lambda = value.parse().map_err(|_| parse_err("a number"))?,
            "c" | "noise_c" => self.noise_c = value.parse().map_err(|_| parse_err("a number"))?,
            "noise_sigma" => {
                self.noise_sigma = value.parse().map_err(|_| parse_err("a number"))?
            }
            "trials" => self.trials = value.parse().map_err(|_| parse_err("a count"))?,
            "epsilon_rel" => {
                self.epsilon_rel = value.parse().map_err(|_| parse_err("a number"))?
            }
            "seed" => self.seed = value.parse().map_err(|_| parse_err("a seed"))?,
            "prox_rank" => {
                self.prox_rank = Some(value.parse().map_err(|_| parse_err("a rank"))?)
            }
            "lambdas" => {
                let parsed: std::result::Result<Vec<f64>, _> =
                    value.split(',').map(|s| s.trim().parse()).collect();
                self.lambdas = parsed.map_err(|_| parse_err("a comma-separated list"))?;
            }
            "scg_iterations" => {
                self.scg_iterations = value.parse().map_err(|_| parse_err("a count"))?
            }
            "scgs_iterations" => {
                self.scgs_iterations = value.parse().map_err(|_| parse_err("a count"))?
            }
            "measure_time" => {
                self.measure_time = value.parse().map_err(|_| parse_err("a boolean"))?
            }
            other => {
                return Err(Error::Config(format!("unknown configuration key {other:?}")));
            }
        }
        Ok(())
    }

    /// Applies every `key = value` pair from a plain-text config file.
    /// Blank lines and `#` comments are ignored.
    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path)?;
        let mut seen = BTreeSet::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::Config(format!(
                    "{}:{}: expected `key = value`, got {line:?}",
                    path.display(),
                    lineno + 1
                )));
            };
            let key = key.trim();
            if !seen.insert(key.to_string()) {
                return Err(Error::Config(format!(
                    "{}:{}: duplicate key {key:?}",
                    path.display(),
                    lineno + 1
                )));
            }
            self.apply(key, value.trim())?;
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials < 1 {
            return Err(Error::Config("need at least one trial".into()));
        }
        if self.d < 2 {
            return Err(Error::Config("dimension must be at least 2".into()));
        }
        if self.r < 1 || self.r > self.d {
            return Err(Error::Config(format!(
                "signal rank must lie in [1, {}], got {}",
                self.d, self.r
            )));
        }
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return Err(Error::Config("penalty weight must be nonnegative".into()));
        }
        if !(self.noise_c >= 0.0) || !(self.noise_sigma >= 0.0) {
            return Err(Error::Config("noise levels must be nonnegative".into()));
        }
        if !(self.epsilon_rel > 0.0 && self.epsilon_rel.is_finite()) {
            return Err(Error::Config("relative accuracy must be positive".into()));
        }
        if let Some(rank) = self.prox_rank {
            if rank < 1 || rank > self.d {
                return Err(Error::Config(format!(
                    "prox rank must lie in [1, {}], got {rank}",
                    self.d
                )));
            }
        }
        if self.experiment == ExperimentKind::SweepLambda {
            if self.lambdas.is_empty() {
                return Err(Error::Config("the sweep needs at least one penalty weight".into()));
            }
            if self.lambdas.iter().any(|l| !(*l >= 0.0 && l.is_finite())) {
                return Err(Error::Config("sweep penalty weights must be nonnegative".into()));
            }
        }
        if self.experiment == ExperimentKind::Figure && self.scg_iterations < 1 {
            return Err(Error::Config("baseline budgets must be at least 1".into()));
        }
        Ok(())
    }

    /// The weak-oracle rank budget this run uses.
    pub fn effective_prox_rank(&self) -> usize {
        match self.prox_rank {
            Some(rank) => rank,
            None => match self.experiment {
                // The planted factor's rank is the natural budget; the table
                // solutions carry slightly more rank than the rank-one
                // signal, so leave headroom there.
                ExperimentKind::Figure => self.r,
                _ => 4.min(self.d),
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overrides_replace_defaults_and_reject_garbage() {
        let mut cfg = ExperimentConfig::table1_defaults();
        cfg.apply("d", "80").unwrap();
        cfg.apply("c", "5.0").unwrap();
        cfg.apply("lambdas", "1, 2, 4").unwrap();
        assert_eq!(cfg.d, 80);
        assert_eq!(cfg.noise_c, 5.0);
        assert_eq!(cfg.lambdas, vec![1.0, 2.0, 4.0]);
        assert!(cfg.apply("d", "eighty").is_err());
        assert!(cfg.apply("no_such_key", "1").is_err());
    }

    #[test]
    fn config_file_parses_comments_and_rejects_duplicates() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bench.conf");
        std::fs::write(&path, "# comment\n\nd = 10\ntrials = 3\n").unwrap();
        let mut cfg = ExperimentConfig::table1_defaults();
        cfg.apply_file(&path).unwrap();
        assert_eq!(cfg.d, 10);
        assert_eq!(cfg.trials, 3);

        std::fs::write(&path, "d = 10\nd = 11\n").unwrap();
        let mut cfg = ExperimentConfig::table1_defaults();
        assert!(cfg.apply_file(&path).is_err());

        std::fs::write(&path, "just words\n").unwrap();
        let mut cfg = ExperimentConfig::table1_defaults();
        assert!(cfg.apply_file(&path).is_err());
    }

    #[test]
    fn validation_catches_inconsistent_settings() {
        let mut cfg = ExperimentConfig::table1_defaults();
        cfg.validate().unwrap();
        cfg.trials = 0;
        assert!(cfg.validate().is_err());

        let mut cfg = ExperimentConfig::figure_defaults();
        cfg.r = 0;
        assert!(cfg.validate().is_err());
        cfg.r = 4;
        cfg.d = 3;
        assert!(cfg.validate().is_err());

        let mut cfg = ExperimentConfig::sweep_defaults();
        cfg.lambdas.clear();
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn prox_rank_defaults_follow_the_experiment() {
        let mut fig = ExperimentConfig::figure_defaults();
        fig.r = 3;
        assert_eq!(fig.effective_prox_rank(), 3);
        fig.prox_rank = Some(7);
        assert_eq!(fig.effective_prox_rank(), 7);
        let table = ExperimentConfig::table1_defaults();
        assert_eq!(table.effective_prox_rank(), 4);
    }
}
