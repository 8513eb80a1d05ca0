//! Result rows and CSV serialization for the benchmark runs.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};

/// Formats a float with 17 significant digits so that parsing the text back
/// reproduces the exact bit pattern.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// One method's averaged results over the trials that completed.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsRow {
    pub method: String,
    /// Number of trials whose run completed without error.
    pub trials_ok: usize,
    pub relative_error: f64,
    /// Nonzero count of the recovered matrix divided by the signal's.
    pub nnz_ratio: f64,
    pub rank: f64,
    /// Mean stochastic gradient evaluations per trial.
    pub gradients: f64,
    /// Mean rank-one factorization cost per trial.
    pub rank1_svd_equiv: f64,
    pub seconds: f64,
}

impl MetricsRow {
    /// Checks the row's plausibility: a completed row has nonnegative
    /// finite metrics, and a row with no completed trials carries NaNs.
    pub fn validate(&self) -> Result<()> {
        if self.method.is_empty() {
            return Err(Error::Config("metrics row is missing its method label".into()));
        }
        if self.trials_ok == 0 {
            return Ok(());
        }
        let fields = [
            ("relative_error", self.relative_error),
            ("nnz_ratio", self.nnz_ratio),
            ("rank", self.rank),
            ("gradients", self.gradients),
            ("rank1_svd_equiv", self.rank1_svd_equiv),
            ("seconds", self.seconds),
        ];
        for (name, v) in fields {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::Config(format!(
                    "metrics field {name} must be nonnegative and finite, got {v}"
                )));
            }
        }
        Ok(())
    }
}

/// One method's outcome on a single trial.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialRow {
    pub trial: usize,
    /// Whether the run completed without error.
    pub ok: bool,
    /// Whether the run reached its accuracy target (always equals `ok` for
    /// experiments without an explicit target).
    pub hit: bool,
    pub relative_error: f64,
    pub nnz_ratio: f64,
    pub rank: f64,
    pub gradients: f64,
    pub rank1_svd_equiv: f64,
    pub seconds: f64,
}

impl TrialRow {
    pub fn failed(trial: usize) -> Self {
        TrialRow {
            trial,
            ok: false,
            hit: false,
            relative_error: f64::NAN,
            nnz_ratio: f64::NAN,
            rank: f64::NAN,
            gradients: f64::NAN,
            rank1_svd_equiv: f64::NAN,
            seconds: f64::NAN,
        }
    }
}

/// Averages the completed trials of one method into a summary row.
pub fn aggregate(method: &str, rows: &[TrialRow]) -> MetricsRow {
    let ok: Vec<&TrialRow> = rows.iter().filter(|r| r.ok).collect();
    let n = ok.len();
    let mean = |pick: fn(&TrialRow) -> f64| -> f64 {
        if n == 0 {
            f64::NAN
        } else {
            ok.iter().map(|r| pick(r)).sum::<f64>() / n as f64
        }
    };
    MetricsRow {
        method: method.to_string(),
        trials_ok: n,
        relative_error: mean(|r| r.relative_error),
        nnz_ratio: mean(|r| r.nnz_ratio),
        rank: mean(|r| r.rank),
        gradients: mean(|r| r.gradients),
        rank1_svd_equiv: mean(|r| r.rank1_svd_equiv),
        seconds: mean(|r| r.seconds),
    }
}

pub const METRICS_HEADER: &str =
    "method,trials_ok,relative_error,nnz_ratio,rank,gradients,rank1_svd_equiv,seconds";

pub const TRIALS_HEADER: &str =
    "trial,ok,hit,relative_error,nnz_ratio,rank,gradients,rank1_svd_equiv,seconds";

/// Writes the averaged metrics table.
pub fn write_metrics_csv(path: &Path, rows: &[MetricsRow]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "{METRICS_HEADER}")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{}",
            r.method,
            r.trials_ok,
            fmt_f64(r.relative_error),
            fmt_f64(r.nnz_ratio),
            fmt_f64(r.rank),
            fmt_f64(r.gradients),
            fmt_f64(r.rank1_svd_equiv),
            fmt_f64(r.seconds),
        )?;
    }
    w.flush()?;
    Ok(())
}

/// Writes one method's per-trial rows (the rank column doubles as the
/// per-trial rank distribution).
pub fn write_trials_csv(path: &Path, rows: &[TrialRow]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "{TRIALS_HEADER}")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{}",
            r.trial,
            u8::from(r.ok),
            u8::from(r.hit),
            fmt_f64(r.relative_error),
            fmt_f64(r.nnz_ratio),
            fmt_f64(r.rank),
            fmt_f64(r.gradients),
            fmt_f64(r.rank1_svd_equiv),
            fmt_f64(r.seconds),
        )?;
    }
    w.flush()?;
    Ok(())
}

/// Renders a solver trace as CSV text. With `epoch_final_only` the output
/// keeps one row per epoch (the last inner step), which is all the table
/// experiment needs; otherwise every recorded step is kept.
pub fn render_trace_csv(trace: &crate::solver::RunTrace, epoch_final_only: bool) -> String {
    let mut out = String::from(crate::solver::TRACE_HEADER);
    out.push('\n');
    for (i, row) in trace.rows.iter().enumerate() {
        let epoch_final =
            trace.rows.get(i + 1).map_or(true, |next| next.epoch != row.epoch);
        if !epoch_final_only || epoch_final {
            out.push_str(&row.csv_line());
            out.push('\n');
        }
    }
    out
}

/// One penalty weight's summary in a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub lambda: f64,
    pub metrics: MetricsRow,
}

pub const SWEEP_HEADER: &str =
    "lambda,method,trials_ok,relative_error,nnz_ratio,rank,gradients,rank1_svd_equiv,seconds";

/// Writes the penalty-sweep table.
pub fn write_sweep_csv(path: &Path, rows: &[SweepRow]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "{SWEEP_HEADER}")?;
    for r in rows {
        let m = &r.metrics;
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{}",
            fmt_f64(r.lambda),
            m.method,
            m.trials_ok,
            fmt_f64(m.relative_error),
            fmt_f64(m.nnz_ratio),
            fmt_f64(m.rank),
            fmt_f64(m.gradients),
            fmt_f64(m.rank1_svd_equiv),
            fmt_f64(m.seconds),
        )?;
    }
    w.flush()?;
    Ok(())
}
