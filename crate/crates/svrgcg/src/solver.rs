//! Variance-reduced conditional-gradient solver over low-rank feasible sets.
//!
//! Each run proceeds in epochs: take a snapshot gradient at the current
//! anchor point, then perform a fixed number of inner steps. Every inner
//! step forms a variance-reduced gradient estimate, asks a (weak or exact)
//! proximal oracle for a feasible point, and moves by convex combination:
//!
//! ```text
//! V ≈ argmin over the set of ‖V − (X − (∇̂g + ∇R_μ)/(2βη))‖² + h(V)/(βη)
//! X ← (1 − η)·X + η·V
//! ```
//!
//! The step size, inner count, batch sizes, epoch count, and oracle slack
//! are all derived from the problem constants and the accuracy target by
//! [`derive_schedule`]; the resulting iterates stay feasible by
//! construction. Traces record objective values and exact sample/SVD
//! accounting after every inner step, so runs are replayable and the
//! counters can be checked against the schedule's closed-form totals.

use std::io::Write as IoWrite;
use std::time::Instant;

use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::check_finite;
use crate::objective::{snapshot_gradient, vr_gradient, StochasticObjective};
use crate::prox::{exact_prox, weak_prox, FeasibleSet, ProxQuery, WeakProxConfig};
use crate::rng::substream;
use crate::smoothing::SmoothTerm;
use crate::Mat;

/// Default per-epoch ceiling on snapshot sample batches.
pub const DEFAULT_SNAPSHOT_CAP: u64 = 1_000_000;

const SNAPSHOT_STREAM: u64 = 0x534e_4150;
const INNER_STREAM: u64 = 0x494e_4e52;
const PROX_STREAM: u64 = 0x5052_4f58;

/// Curvature and noise constants of a composite problem G + R_μ + h.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProblemConstants {
    /// Strong convexity α of G + R_μ.
    pub strong_convexity: f64,
    /// Smoothness β_G shared by the sampled components of G.
    pub smooth_part: f64,
    /// Smoothness β_R of the smoothed penalty (zero when absent).
    pub penalty_part: f64,
    /// Sampling noise bound σ with E‖∇G − ∇g‖² ≤ σ².
    pub noise_bound: f64,
}

impl ProblemConstants {
    pub fn new(
        strong_convexity: f64,
        smooth_part: f64,
        penalty_part: f64,
        noise_bound: f64,
    ) -> Result<Self> {
        let c = ProblemConstants { strong_convexity, smooth_part, penalty_part, noise_bound };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.strong_convexity > 0.0 && self.strong_convexity.is_finite()) {
            return Err(Error::Domain(format!(
                "strong convexity must be positive and finite, got {}",
                self.strong_convexity
            )));
        }
        if !(self.smooth_part >= 0.0) || !(self.penalty_part >= 0.0) {
            return Err(Error::Domain("smoothness constants must be nonnegative".into()));
        }
        if !(self.noise_bound >= 0.0 && self.noise_bound.is_finite()) {
            return Err(Error::Domain("noise bound must be nonnegative and finite".into()));
        }
        let beta = self.smoothness();
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(Error::Domain("total smoothness must be positive and finite".into()));
        }
        if self.strong_convexity > beta * (1.0 + 1e-12) {
            return Err(Error::Domain(format!(
                "strong convexity {} exceeds total smoothness {}",
                self.strong_convexity, beta
            )));
        }
        Ok(())
    }

    /// Total smoothness β = β_G + β_R.
    pub fn smoothness(&self) -> f64 {
        self.smooth_part + self.penalty_part
    }
}

/// Which proximal oracle the solver queries at every inner step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProxPolicy {
    /// Full-spectrum projection; each call costs min(rows, cols) rank-one
    /// SVD equivalents.
    Exact,
    /// Rank-limited oracle; each call costs `target_rank` rank-one SVD
    /// equivalents. During a run the oracle's tolerance budget is the larger
    /// of the config's `delta` and the schedule's derived tolerance — the
    /// guarantee never benefits from a tighter budget than the schedule's.
    Weak(WeakProxConfig),
}

impl ProxPolicy {
    fn rank_one_cost(&self, shape: (usize, usize)) -> u128 {
        match self {
            ProxPolicy::Exact => shape.0.min(shape.1) as u128,
            ProxPolicy::Weak(cfg) => cfg.target_rank as u128,
        }
    }
}

/// Derived run plan: all loop lengths, batch sizes, and slacks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Schedule {
    /// Number of epochs S.
    pub epochs: u64,
    /// Inner steps per epoch T.
    pub inner_steps: u64,
    /// Convex-combination step size η.
    pub step_size: f64,
    /// Samples per variance-reduced estimate k_t (zero selects the
    /// sample-free path for objectives that support it).
    pub inner_batch: u64,
    /// First-epoch snapshot batch size; epoch s uses base·2^(s−1).
    pub snapshot_base: u64,
    /// Per-epoch ceiling on snapshot batches.
    pub snapshot_cap: u64,
    /// Allowed proximal suboptimality δ.
    pub prox_slack: f64,
    /// Initial objective gap estimate C₀.
    pub initial_gap: f64,
    /// Copies of the constants the schedule was derived from.
    pub strong_convexity: f64,
    pub smoothness: f64,
}

impl Schedule {
    /// Snapshot batch for 1-based epoch `s`: min(base·2^(s−1), cap).
    pub fn snapshot_batch(&self, s: u64) -> u64 {
        assert!(s >= 1, "epochs are 1-based");
        if self.snapshot_base == 0 {
            return 0;
        }
        let shift = s - 1;
        if shift >= 64 {
            return self.snapshot_cap;
        }
        match (self.snapshot_base as u128).checked_shl(shift as u32) {
            Some(v) if v <= self.snapshot_cap as u128 => v as u64,
            _ => self.snapshot_cap,
        }
    }

    /// Whether any epoch's snapshot batch hits the ceiling.
    pub fn any_snapshot_capped(&self) -> bool {
        (1..=self.epochs).any(|s| {
            self.snapshot_base != 0 && {
                let shift = s - 1;
                shift >= 64
                    || (self.snapshot_base as u128) << shift > self.snapshot_cap as u128
            }
        })
    }

    /// Total snapshot samples over all epochs, honoring the cap.
    pub fn total_snapshot_samples(&self) -> u128 {
        (1..=self.epochs).map(|s| self.snapshot_batch(s) as u128).sum()
    }

    /// Total inner-step samples S·T·k_t.
    pub fn total_inner_samples(&self) -> u128 {
        self.epochs as u128 * self.inner_steps as u128 * self.inner_batch as u128
    }

    /// Total stochastic samples a full run consumes.
    pub fn total_samples(&self) -> u128 {
        self.total_snapshot_samples() + self.total_inner_samples()
    }

    /// Forces the sample-free inner path (objectives with exact pair
    /// differences need no inner samples).
    pub fn with_sample_free_inner(mut self) -> Self {
        self.inner_batch = 0;
        self
    }

    pub fn with_epochs(mut self, epochs: u64) -> Self {
        assert!(epochs >= 1);
        self.epochs = epochs;
        self
    }

    pub fn with_snapshot_cap(mut self, cap: u64) -> Self {
        assert!(cap >= 1);
        self.snapshot_cap = cap;
        self
    }

    /// The step-size invariant 2βη ≤ α the update relies on.
    pub fn step_invariant_holds(&self) -> bool {
        2.0 * self.smoothness * self.step_size <= self.strong_convexity * (1.0 + 1e-12)
    }
}

/// Derives the full run plan from the problem constants and the accuracy
/// target `epsilon`, given an upper bound `initial_gap` on f(X₁) − f*.
pub fn derive_schedule(
    constants: &ProblemConstants,
    epsilon: f64,
    initial_gap: f64,
) -> Result<Schedule> {
    constants.validate()?;
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::Domain(format!("accuracy target must be positive, got {epsilon}")));
    }
    if !(initial_gap > 0.0 && initial_gap.is_finite()) {
        return Err(Error::Domain(format!("initial gap must be positive, got {initial_gap}")));
    }
    let alpha = constants.strong_convexity;
    let beta = constants.smoothness();
    let inner_steps = (8.0 * beta / (3.0 * alpha) * 8f64.ln() + 1.0).ceil() as u64;
    let step_size = alpha / (2.0 * beta);
    let inner_batch = if constants.smooth_part == 0.0 {
        0
    } else {
        (32.0 * constants.smooth_part.powi(2) / alpha.powi(2)).ceil() as u64
    };
    let snapshot_base = if constants.noise_bound == 0.0 {
        0
    } else {
        (32.0 * constants.noise_bound.powi(2) / (alpha * initial_gap)).ceil() as u64
    };
    let epochs = ((initial_gap / epsilon).log2().ceil() as i64 + 2).max(1) as u64;
    let prox_slack = 7.0 * epsilon / (16.0 * alpha);
    Ok(Schedule {
        epochs,
        inner_steps,
        step_size,
        inner_batch,
        snapshot_base,
        snapshot_cap: DEFAULT_SNAPSHOT_CAP,
        prox_slack,
        initial_gap,
        strong_convexity: alpha,
        smoothness: beta,
    })
}

/// Convergence model a run is predicted under.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunKind {
    /// Sampling oracle with geometrically growing snapshot batches.
    Stochastic,
    /// Explicit finite sum with exact snapshots.
    FiniteSum,
}

/// Predicted objective gap bound at the start of 1-based epoch `s`:
/// a geometric term plus the oracle-slack floor 8αδ/7.
pub fn predicted_error(schedule: &Schedule, s: u64, kind: RunKind) -> f64 {
    assert!(s >= 1, "epochs are 1-based");
    let rate: f64 = match kind {
        RunKind::Stochastic => 0.5,
        RunKind::FiniteSum => 5.0 / 12.0,
    };
    let floor = 8.0 * schedule.strong_convexity * schedule.prox_slack / 7.0;
    schedule.initial_gap * rate.powi((s - 1) as i32) + floor
}

/// Column header shared by every trace CSV this crate writes.
pub const TRACE_HEADER: &str = "epoch,inner_step,f,f_mu,stoch_grads,rank1_svd_equiv,wall_seconds";

/// One recorded inner step: objective values and cumulative cost counters.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub epoch: u64,
    pub inner_step: u64,
    /// Original objective G + R (nonsmooth penalty) at the new iterate.
    pub f: f64,
    /// Smoothed objective G + R_μ at the new iterate.
    pub f_mu: f64,
    /// Cumulative stochastic component-gradient samples.
    pub stoch_grads: u128,
    /// Cumulative rank-one SVD equivalents spent by proximal calls.
    pub rank1_svd_equiv: u128,
    /// Elapsed wall-clock seconds (zero unless timing was requested).
    pub wall_seconds: f64,
}

impl TraceRow {
    /// Renders the row in [`TRACE_HEADER`] column order; floats carry 17
    /// significant digits so equal rows print byte-identically.
    pub fn csv_line(&self) -> String {
        format!(
            "{},{},{:.16e},{:.16e},{},{},{:.16e}",
            self.epoch,
            self.inner_step,
            self.f,
            self.f_mu,
            self.stoch_grads,
            self.rank1_svd_equiv,
            self.wall_seconds
        )
    }
}

/// Full record of a solver run.
#[derive(Debug, Clone)]
pub struct RunTrace {
    pub rows: Vec<TraceRow>,
    /// Objective values at the initial point, before any step.
    pub initial_f: f64,
    pub initial_f_mu: f64,
    /// Snapshot batch actually drawn per epoch.
    pub snapshot_batches: Vec<u64>,
    /// Whether any snapshot batch hit the per-epoch cap.
    pub snapshot_cap_hit: bool,
    pub final_point: Mat,
}

impl RunTrace {
    /// Final objective value (initial value for zero-length runs).
    pub fn final_f(&self) -> f64 {
        self.rows.last().map_or(self.initial_f, |r| r.f)
    }

    /// Cumulative stochastic samples consumed by the whole run.
    pub fn total_samples(&self) -> u128 {
        self.rows.last().map_or(0, |r| r.stoch_grads)
    }

    /// Cumulative rank-one SVD equivalents spent by the whole run.
    pub fn total_rank_one_svds(&self) -> u128 {
        self.rows.last().map_or(0, |r| r.rank1_svd_equiv)
    }

    /// Objective value at the end of each epoch, in epoch order.
    pub fn epoch_final_f(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for w in self.rows.windows(2) {
            if w[1].epoch != w[0].epoch {
                out.push(w[0].f);
            }
        }
        if let Some(last) = self.rows.last() {
            out.push(last.f);
        }
        out
    }

    /// Writes the trace as CSV with a fixed header; floats are printed with
    /// 17 significant digits so equal runs produce byte-identical files.
    pub fn write_csv<W: IoWrite>(&self, mut w: W) -> Result<()> {
        writeln!(w, "{TRACE_HEADER}")?;
        for r in &self.rows {
            writeln!(w, "{}", r.csv_line())?;
        }
        Ok(())
    }
}

/// A composite problem: sampled smooth part, optional smoothed penalty, and
/// a feasible set enforced through proximal steps.
pub struct CompositeProblem<O: StochasticObjective> {
    pub objective: O,
    pub smooth_term: Option<SmoothTerm>,
    pub set: FeasibleSet,
    pub constants: ProblemConstants,
}

impl<O: StochasticObjective> CompositeProblem<O> {
    /// Bundles the parts and derives the constants from them.
    pub fn new(objective: O, smooth_term: Option<SmoothTerm>, set: FeasibleSet) -> Result<Self> {
        let constants = derived_constants(&objective, smooth_term.as_ref())?;
        Self::with_constants(objective, smooth_term, set, constants)
    }

    /// Bundles the parts with explicitly supplied constants.
    pub fn with_constants(
        objective: O,
        smooth_term: Option<SmoothTerm>,
        set: FeasibleSet,
        constants: ProblemConstants,
    ) -> Result<Self> {
        constants.validate()?;
        if let Some(term) = &smooth_term {
            if term.shape() != objective.shape() {
                return Err(Error::dims(
                    format!("{}x{}", objective.shape().0, objective.shape().1),
                    format!("{}x{}", term.shape().0, term.shape().1),
                ));
            }
        }
        if matches!(set, FeasibleSet::TracePsdCone { .. }) && objective.shape().0 != objective.shape().1 {
            return Err(Error::Domain(
                "the trace-bounded PSD cone needs a square variable".into(),
            ));
        }
        Ok(CompositeProblem { objective, smooth_term, set, constants })
    }

    /// Original objective G + R (nonsmooth penalty) at `x`.
    pub fn original_value(&self, x: &Mat) -> Result<f64> {
        let g = self.objective.exact_value(x)?;
        let r = match &self.smooth_term {
            Some(t) => t.nonsmooth_value(x)?,
            None => 0.0,
        };
        Ok(g + r)
    }

    /// Smoothed objective G + R_μ at `x`.
    pub fn smoothed_value(&self, x: &Mat) -> Result<f64> {
        let g = self.objective.exact_value(x)?;
        let r = match &self.smooth_term {
            Some(t) => t.value(x)?,
            None => 0.0,
        };
        Ok(g + r)
    }
}

/// Derives [`ProblemConstants`] from an objective and optional penalty.
pub fn derived_constants(
    objective: &impl StochasticObjective,
    smooth_term: Option<&SmoothTerm>,
) -> Result<ProblemConstants> {
    let (penalty_part, penalty_alpha) = match smooth_term {
        Some(t) => (t.spec().beta_r(), t.strong_convexity()),
        None => (0.0, 0.0),
    };
    ProblemConstants::new(
        objective.strong_convexity() + penalty_alpha,
        objective.smoothness(),
        penalty_part,
        objective.noise_bound(),
    )
}

/// Per-step observation handed to run observers.
pub struct StepEvent<'a> {
    pub epoch: u64,
    pub inner_step: u64,
    pub previous: &'a Mat,
    pub prox_point: &'a Mat,
    pub next: &'a Mat,
    pub step_size: f64,
}

/// Optional run behavior.
#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    /// Record real elapsed wall-clock time per row. Off by default so equal
    /// runs produce byte-identical traces.
    pub measure_time: bool,
}

/// Runs the solver on a sampling oracle.
pub fn svrgcg_run<O: StochasticObjective>(
    problem: &CompositeProblem<O>,
    schedule: &Schedule,
    policy: &ProxPolicy,
    seed: u64,
) -> Result<RunTrace> {
    run_core(problem, schedule, policy, seed, RunOptions::default(), &mut |_| {})
}

/// [`svrgcg_run`] with explicit options.
pub fn svrgcg_run_with_options<O: StochasticObjective>(
    problem: &CompositeProblem<O>,
    schedule: &Schedule,
    policy: &ProxPolicy,
    seed: u64,
    options: RunOptions,
) -> Result<RunTrace> {
    run_core(problem, schedule, policy, seed, options, &mut |_| {})
}

/// [`svrgcg_run`] that reports every accepted step to `observer`.
pub fn svrgcg_run_observed<O: StochasticObjective>(
    problem: &CompositeProblem<O>,
    schedule: &Schedule,
    policy: &ProxPolicy,
    seed: u64,
    observer: &mut dyn FnMut(&StepEvent),
) -> Result<RunTrace> {
    run_core(problem, schedule, policy, seed, RunOptions::default(), observer)
}

/// Runs the solver on an explicit finite sum (exact snapshots each epoch).
pub fn finite_sum_run<O: StochasticObjective>(
    problem: &CompositeProblem<O>,
    schedule: &Schedule,
    policy: &ProxPolicy,
    seed: u64,
) -> Result<RunTrace> {
    if problem.objective.component_count().is_none() {
        return Err(Error::Config(
            "finite-sum runs need an objective with explicitly listed components".into(),
        ));
    }
    run_core(problem, schedule, policy, seed, RunOptions::default(), &mut |_| {})
}

fn run_core<O: StochasticObjective>(
    problem: &CompositeProblem<O>,
    schedule: &Schedule,
    policy: &ProxPolicy,
    seed: u64,
    options: RunOptions,
    observer: &mut dyn FnMut(&StepEvent),
) -> Result<RunTrace> {
    if !schedule.step_invariant_holds() {
        return Err(Error::Config(format!(
            "step size {} violates 2βη ≤ α for β = {}, α = {}",
            schedule.step_size, schedule.smoothness, schedule.strong_convexity
        )));
    }
    let beta = problem.constants.smoothness();
    if (beta - schedule.smoothness).abs() > 1e-9 * (1.0 + beta)
        || (problem.constants.strong_convexity - schedule.strong_convexity).abs()
            > 1e-9 * (1.0 + problem.constants.strong_convexity)
    {
        return Err(Error::Config(
            "schedule constants disagree with the problem constants".into(),
        ));
    }
    if let ProxPolicy::Weak(cfg) = policy {
        let max_rank = problem.objective.shape().0.min(problem.objective.shape().1);
        if cfg.target_rank > max_rank {
            return Err(Error::Config(format!(
                "weak prox rank {} exceeds the variable's max rank {max_rank}",
                cfg.target_rank
            )));
        }
    }

    let shape = problem.objective.shape();
    let eta = schedule.step_size;
    let prox_scale = beta * eta;
    let center_factor = 1.0 / (2.0 * beta * eta);

    // The convergence analysis grants the oracle the schedule's tolerance
    // budget; honor a caller-provided budget only when it is more generous.
    // A tighter budget buys nothing in the guarantee and would force strict
    // factorizations that can fail on clustered prox centers.
    let weak_cfg = match policy {
        ProxPolicy::Weak(cfg) => Some(WeakProxConfig {
            target_rank: cfg.target_rank,
            delta: cfg.delta.max(schedule.prox_slack),
        }),
        ProxPolicy::Exact => None,
    };

    let mut x = Mat::zeros(shape);
    let initial_f = problem.original_value(&x)?;
    let initial_f_mu = problem.smoothed_value(&x)?;

    let start = Instant::now();
    let mut rows = Vec::with_capacity((schedule.epochs * schedule.inner_steps) as usize);
    let mut snapshot_batches = Vec::with_capacity(schedule.epochs as usize);
    let mut cum_samples: u128 = 0;
    let mut cum_rank_one: u128 = 0;
    let mut cap_hit = false;

    for s in 1..=schedule.epochs {
        let k_s = schedule.snapshot_batch(s);
        if schedule.snapshot_base != 0 && k_s == schedule.snapshot_cap {
            // Only flag epochs where the uncapped batch would exceed the cap.
            let shift = s - 1;
            if shift >= 64 || (schedule.snapshot_base as u128) << shift > schedule.snapshot_cap as u128
            {
                cap_hit = true;
            }
        }
        snapshot_batches.push(k_s);
        let mut snap_rng = substream(seed, &[SNAPSHOT_STREAM, s]);
        let state = snapshot_gradient(&problem.objective, &x, k_s, &mut snap_rng)?;
        cum_samples += state.snapshot_sample_count as u128;

        for t in 1..=schedule.inner_steps {
            let mut inner_rng = substream(seed, &[INNER_STREAM, s, t]);
            let estimate =
                vr_gradient(&problem.objective, &state, &x, schedule.inner_batch, &mut inner_rng)?;
            cum_samples += estimate.samples_used as u128;

            let mut direction = estimate.gradient;
            if let Some(term) = &problem.smooth_term {
                direction += &term.gradient(&x)?;
            }
            let center = &x - &(center_factor * &direction);
            let query = ProxQuery::new(center, prox_scale, problem.set)?;
            let v = match &weak_cfg {
                None => exact_prox(&query)?,
                Some(cfg) => {
                    let prox_seed = substream(seed, &[PROX_STREAM, s, t]).next_u64();
                    weak_prox(&query, cfg, prox_seed)?.point
                }
            };
            cum_rank_one += policy.rank_one_cost(shape);

            let next = (1.0 - eta) * &x + eta * &v;
            observer(&StepEvent {
                epoch: s,
                inner_step: t,
                previous: &x,
                prox_point: &v,
                next: &next,
                step_size: eta,
            });
            x = next;
            check_finite(&x, "solver iterate")?;

            rows.push(TraceRow {
                epoch: s,
                inner_step: t,
                f: problem.original_value(&x)?,
                f_mu: problem.smoothed_value(&x)?,
                stoch_grads: cum_samples,
                rank1_svd_equiv: cum_rank_one,
                wall_seconds: if options.measure_time {
                    start.elapsed().as_secs_f64()
                } else {
                    0.0
                },
            });
        }
    }

    Ok(RunTrace {
        rows,
        initial_f,
        initial_f_mu,
        snapshot_batches,
        snapshot_cap_hit: cap_hit,
        final_point: x,
    })
}

/// Result of the smoothing pipeline around a solver run.
#[derive(Debug, Clone)]
pub struct SmoothedReport {
    pub trace: RunTrace,
    pub schedule: Schedule,
    pub constants: ProblemConstants,
    /// Smoothing level the run actually used.
    pub mu: f64,
}

/// End-to-end pipeline for nonsmooth penalties: picks the smoothing level
/// from the accuracy target (unless overridden), rebuilds the penalty at
/// that level, derives a schedule for half the target (the other half pays
/// for the smoothing bias), and runs the solver. Traces report the original
/// nonsmooth objective alongside the smoothed one.
#[allow(clippy::too_many_arguments)]
pub fn smoothed_solve<O: StochasticObjective>(
    objective: O,
    penalty: &SmoothTerm,
    set: FeasibleSet,
    epsilon: f64,
    initial_gap: f64,
    policy: &ProxPolicy,
    seed: u64,
    mu_override: Option<f64>,
) -> Result<SmoothedReport> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::Domain(format!("accuracy target must be positive, got {epsilon}")));
    }
    let mu = match mu_override {
        Some(m) if m > 0.0 && m.is_finite() => m,
        Some(m) => {
            return Err(Error::Domain(format!("smoothing level must be positive, got {m}")))
        }
        None => crate::smoothing::choose_mu(epsilon, penalty.kind())?,
    };
    let term = penalty.with_mu(mu)?;
    let supports_sample_free = objective.exact_pair_difference(
        &Mat::zeros(objective.shape()),
        &Mat::zeros(objective.shape()),
    ) .is_some();
    let problem = CompositeProblem::new(objective, Some(term), set)?;
    let mut schedule = derive_schedule(&problem.constants, epsilon / 2.0, initial_gap)?;
    if supports_sample_free {
        schedule = schedule.with_sample_free_inner();
    }
    let trace = svrgcg_run(&problem, &schedule, policy, seed)?;
    Ok(SmoothedReport { trace, schedule, constants: problem.constants, mu })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{frobenius_norm, max_abs_diff};
    use crate::objective::{
        matrix_estimation_objective, FiniteSumObjective, MatrixEstimation, QuadraticComponent,
    };
    use crate::rng::gaussian_matrix;
    use crate::smoothing::{HuberL1, SmoothTerm};

    fn small_target(tag: u64) -> Mat {
        let mut rng = substream(0xbeef, &[tag]);
        gaussian_matrix(4, 4, &mut rng)
    }

    fn reference_constants() -> ProblemConstants {
        ProblemConstants::new(1.0, 1.0, 1.0, 0.0).unwrap()
    }

    #[test]
    fn schedule_matches_closed_forms_for_unit_constants() {
        let schedule = derive_schedule(&reference_constants(), 1e-3, 1.0).unwrap();
        assert_eq!(schedule.step_size, 0.25);
        assert_eq!(schedule.inner_steps, 13);
        assert_eq!(schedule.inner_batch, 32);
        assert_eq!(schedule.snapshot_base, 0);
        assert_eq!(schedule.epochs, 12);
        let expected_slack = 7.0 * 1e-3 / 16.0;
        assert!((schedule.prox_slack - expected_slack).abs() < 1e-15);
        assert!(schedule.step_invariant_holds());
    }

    #[test]
    fn noise_free_problems_take_exact_snapshots() {
        let constants = ProblemConstants::new(1.0, 1.0, 0.0, 0.0).unwrap();
        let schedule = derive_schedule(&constants, 1e-2, 4.0).unwrap();
        assert_eq!(schedule.snapshot_base, 0);
        assert_eq!(schedule.snapshot_batch(3), 0);
        assert!(!schedule.any_snapshot_capped());
    }

    #[test]
    fn snapshot_batches_double_then_hit_the_cap() {
        let constants = ProblemConstants::new(1.0, 1.0, 0.0, 200.0).unwrap();
        // base = ceil(32·200²/(1·1)) = 1.28e6 > cap already at the 1st epoch.
        let schedule = derive_schedule(&constants, 0.5, 1.0).unwrap();
        assert_eq!(schedule.snapshot_batch(1), DEFAULT_SNAPSHOT_CAP);
        assert!(schedule.any_snapshot_capped());

        let mild = ProblemConstants::new(1.0, 1.0, 0.0, 2.0).unwrap();
        let schedule = derive_schedule(&mild, 1e-3, 1.0).unwrap();
        assert_eq!(schedule.snapshot_base, 128);
        assert_eq!(schedule.snapshot_batch(1), 128);
        assert_eq!(schedule.snapshot_batch(2), 256);
        assert_eq!(schedule.snapshot_batch(5), 2048);
    }

    #[test]
    fn schedule_rejects_bad_targets() {
        let c = reference_constants();
        assert!(matches!(derive_schedule(&c, 0.0, 1.0), Err(Error::Domain(_))));
        assert!(matches!(derive_schedule(&c, -1.0, 1.0), Err(Error::Domain(_))));
        assert!(matches!(derive_schedule(&c, f64::NAN, 1.0), Err(Error::Domain(_))));
        assert!(matches!(derive_schedule(&c, 1e-3, 0.0), Err(Error::Domain(_))));
        assert!(matches!(derive_schedule(&c, 1e-3, f64::INFINITY), Err(Error::Domain(_))));
    }

    #[test]
    fn constants_reject_degenerate_curvature() {
        assert!(ProblemConstants::new(0.0, 1.0, 0.0, 0.0).is_err());
        assert!(ProblemConstants::new(1.0, 0.0, 0.0, 0.0).is_err());
        assert!(ProblemConstants::new(3.0, 1.0, 1.0, 0.0).is_err());
        assert!(ProblemConstants::new(1.0, 1.0, 1.0, -1.0).is_err());
    }

    #[test]
    fn closed_form_totals_match_direct_summation() {
        let constants = ProblemConstants::new(1.0, 1.0, 0.0, 3.0).unwrap();
        let schedule = derive_schedule(&constants, 1e-2, 2.0).unwrap();
        let direct: u128 = (1..=schedule.epochs).map(|s| schedule.snapshot_batch(s) as u128).sum();
        assert_eq!(schedule.total_snapshot_samples(), direct);
        assert_eq!(
            schedule.total_samples(),
            direct + schedule.epochs as u128 * schedule.inner_steps as u128 * schedule.inner_batch as u128
        );
    }

    #[test]
    fn predicted_error_matches_hand_computed_values() {
        let mut schedule = derive_schedule(&reference_constants(), 1e-3, 8.0).unwrap();
        // At the first epoch the bound is the initial gap plus the floor.
        let floor = 8.0 * schedule.strong_convexity * schedule.prox_slack / 7.0;
        assert!((predicted_error(&schedule, 1, RunKind::Stochastic) - (8.0 + floor)).abs() < 1e-12);

        schedule.prox_slack = 0.0;
        assert!((predicted_error(&schedule, 4, RunKind::Stochastic) - 1.0).abs() < 1e-12);
        let fs = predicted_error(&schedule, 3, RunKind::FiniteSum);
        assert!((fs - 8.0 * 25.0 / 144.0).abs() < 1e-12);
    }

    fn deterministic_problem(tag: u64) -> CompositeProblem<MatrixEstimation> {
        let target = small_target(tag);
        let tau = 2.0 * crate::linalg::nuclear_norm(&target).unwrap();
        let objective = matrix_estimation_objective(target, 0.0).unwrap();
        CompositeProblem::new(objective, None, FeasibleSet::nuclear_ball(tau).unwrap()).unwrap()
    }

    #[test]
    fn deterministic_quadratic_reaches_its_accuracy_target() {
        let problem = deterministic_problem(1);
        let c0 = problem.original_value(&Mat::zeros((4, 4))).unwrap();
        let epsilon = c0 / 256.0;
        let schedule = derive_schedule(&problem.constants, epsilon, c0)
            .unwrap()
            .with_sample_free_inner();
        let trace = svrgcg_run(&problem, &schedule, &ProxPolicy::Exact, 7).unwrap();
        // The unconstrained minimizer lies inside the ball, so f* = 0.
        assert!(
            trace.final_f() <= epsilon,
            "final gap {} above target {epsilon}",
            trace.final_f()
        );
        // The bound must hold at the end of every epoch.
        let per_epoch = trace.epoch_final_f();
        for (i, f) in per_epoch.iter().enumerate() {
            let bound = predicted_error(&schedule, i as u64 + 2, RunKind::Stochastic);
            assert!(f <= &bound, "epoch {} gap {f} above prediction {bound}", i + 1);
        }
    }

    #[test]
    fn single_epoch_single_step_trace_has_one_row() {
        let problem = deterministic_problem(2);
        let mut schedule = derive_schedule(&problem.constants, 0.5, 1.0)
            .unwrap()
            .with_sample_free_inner()
            .with_epochs(1);
        schedule.inner_steps = 1;
        let trace = svrgcg_run(&problem, &schedule, &ProxPolicy::Exact, 3).unwrap();
        assert_eq!(trace.rows.len(), 1);
        assert_eq!(trace.rows[0].epoch, 1);
        assert_eq!(trace.rows[0].inner_step, 1);
        assert!(trace.initial_f >= trace.rows[0].f);
    }

    #[test]
    fn single_component_finite_sum_matches_sample_free_run() {
        let target = small_target(3);
        let tau = 1.5 * crate::linalg::nuclear_norm(&target).unwrap();
        let set = FeasibleSet::nuclear_ball(tau).unwrap();

        let me = matrix_estimation_objective(target.clone(), 0.0).unwrap();
        let det_problem = CompositeProblem::new(me, None, set).unwrap();
        let det_schedule = derive_schedule(&det_problem.constants, 1e-2, 4.0)
            .unwrap()
            .with_sample_free_inner();
        let det = svrgcg_run(&det_problem, &det_schedule, &ProxPolicy::Exact, 11).unwrap();

        let component = QuadraticComponent::new(1.0, target).unwrap();
        let fs = FiniteSumObjective::new(vec![component], (4, 4)).unwrap();
        let fs_problem = CompositeProblem::new(fs, None, set).unwrap();
        let fs_schedule = derive_schedule(&fs_problem.constants, 1e-2, 4.0).unwrap();
        let fs_trace = finite_sum_run(&fs_problem, &fs_schedule, &ProxPolicy::Exact, 11).unwrap();

        // Sampling a single-component sum always returns that component, so
        // the two runs follow the same trajectory up to floating-point
        // accumulation in the batch average.
        assert!(max_abs_diff(&det.final_point, &fs_trace.final_point) <= 1e-12);
        for (a, b) in det.rows.iter().zip(fs_trace.rows.iter()) {
            assert!((a.f - b.f).abs() <= 1e-12 * (1.0 + a.f.abs()));
        }
        // Counters differ: the finite sum pays one component per snapshot
        // plus sampled inner batches.
        assert_eq!(det.total_samples(), 0);
        assert_eq!(
            fs_trace.total_samples(),
            fs_schedule.epochs as u128
                * (1 + fs_schedule.inner_steps as u128 * fs_schedule.inner_batch as u128)
        );
    }

    #[test]
    fn gradient_accounting_matches_schedule_totals() {
        let center = small_target(4);
        let objective =
            crate::objective::StochasticQuadratic::new(center, vec![0.5, 1.5], 0.1, 2.0).unwrap();
        let set = FeasibleSet::nuclear_ball(3.0).unwrap();
        let problem = CompositeProblem::new(objective, None, set).unwrap();
        let schedule = derive_schedule(&problem.constants, 0.25, 1.0).unwrap();
        let trace = svrgcg_run(&problem, &schedule, &ProxPolicy::Exact, 5).unwrap();
        assert_eq!(trace.total_samples(), schedule.total_samples());
        assert_eq!(
            trace.total_rank_one_svds(),
            schedule.epochs as u128 * schedule.inner_steps as u128 * 4
        );
    }

    #[test]
    fn iterates_are_feasible_convex_combinations() {
        let problem = deterministic_problem(5);
        let schedule = derive_schedule(&problem.constants, 1e-2, 4.0)
            .unwrap()
            .with_sample_free_inner()
            .with_epochs(2);
        let mut checked = 0;
        svrgcg_run_observed(&problem, &schedule, &ProxPolicy::Exact, 9, &mut |ev| {
            let recombined = (1.0 - ev.step_size) * ev.previous + ev.step_size * ev.prox_point;
            assert_eq!(max_abs_diff(&recombined, ev.next), 0.0);
            assert!(problem.set.contains(ev.next, 1e-8).unwrap());
            assert!(problem.set.contains(ev.prox_point, 1e-8).unwrap());
            checked += 1;
        })
        .unwrap();
        assert_eq!(checked as u64, schedule.epochs * schedule.inner_steps);
    }

    #[test]
    fn equal_seeds_reproduce_traces_bitwise() {
        let center = small_target(6);
        let objective =
            crate::objective::StochasticQuadratic::new(center, vec![0.5, 1.5], 0.2, 2.0).unwrap();
        let set = FeasibleSet::nuclear_ball(2.0).unwrap();
        let problem = CompositeProblem::new(objective, None, set).unwrap();
        let schedule = derive_schedule(&problem.constants, 0.25, 1.0).unwrap().with_epochs(3);
        let cfg = WeakProxConfig::new(2, schedule.prox_slack).unwrap();
        let a = svrgcg_run(&problem, &schedule, &ProxPolicy::Weak(cfg), 42).unwrap();
        let b = svrgcg_run(&problem, &schedule, &ProxPolicy::Weak(cfg), 42).unwrap();
        assert_eq!(a.rows.len(), b.rows.len());
        for (ra, rb) in a.rows.iter().zip(b.rows.iter()) {
            assert_eq!(ra, rb);
        }
        assert_eq!(max_abs_diff(&a.final_point, &b.final_point), 0.0);

        let c = svrgcg_run(&problem, &schedule, &ProxPolicy::Weak(cfg), 43).unwrap();
        assert!(max_abs_diff(&a.final_point, &c.final_point) > 0.0);
    }

    #[test]
    fn trace_csv_has_the_documented_header_and_row_count() {
        let problem = deterministic_problem(7);
        let schedule = derive_schedule(&problem.constants, 0.5, 2.0)
            .unwrap()
            .with_sample_free_inner()
            .with_epochs(2);
        let trace = svrgcg_run(&problem, &schedule, &ProxPolicy::Exact, 1).unwrap();
        let mut buf = Vec::new();
        trace.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "epoch,inner_step,f,f_mu,stoch_grads,rank1_svd_equiv,wall_seconds"
        );
        assert_eq!(lines.count(), trace.rows.len());
        assert!(text.contains(",0.0000000000000000e0\n") || text.ends_with(",0.0000000000000000e0"));
    }

    #[test]
    fn smoothed_pipeline_picks_the_documented_level_and_reports_nonsmooth_values() {
        let target = small_target(8);
        let objective = matrix_estimation_objective(target, 0.0).unwrap();
        let penalty =
            SmoothTerm::Huber(HuberL1::new(0.5, 1.0, (4, 4)).unwrap());
        let set = FeasibleSet::nuclear_ball(3.0).unwrap();
        let epsilon = 0.46;
        let report = smoothed_solve(
            objective.clone(),
            &penalty,
            set,
            epsilon,
            4.0,
            &ProxPolicy::Exact,
            13,
            None,
        )
        .unwrap();
        let expected_mu = 7.0 * epsilon / (46.0 * 16.0);
        assert!((report.mu - expected_mu).abs() < 1e-15);
        // Half the target pays for smoothing, so the schedule slack uses ε/2.
        let expected_slack = 7.0 * (epsilon / 2.0) / (16.0 * report.constants.strong_convexity);
        assert!((report.schedule.prox_slack - expected_slack).abs() < 1e-15);
        assert_eq!(report.schedule.inner_batch, 0, "sample-free path expected");

        // Reported f is the original nonsmooth objective.
        let x = &report.trace.final_point;
        let f = objective.exact_value(x).unwrap() + penalty.with_mu(report.mu).unwrap().nonsmooth_value(x).unwrap();
        assert!((report.trace.rows.last().unwrap().f - f).abs() < 1e-12);

        let override_report = smoothed_solve(
            objective,
            &penalty,
            set,
            epsilon,
            4.0,
            &ProxPolicy::Exact,
            13,
            Some(0.25),
        )
        .unwrap();
        assert_eq!(override_report.mu, 0.25);
    }

    #[test]
    fn halving_the_target_adds_one_epoch() {
        let c = reference_constants();
        let a = derive_schedule(&c, 1e-2, 1.0).unwrap();
        let b = derive_schedule(&c, 5e-3, 1.0).unwrap();
        assert_eq!(b.epochs, a.epochs + 1);
    }

    #[test]
    fn runs_reject_inconsistent_schedules() {
        let problem = deterministic_problem(9);
        let other = ProblemConstants::new(0.5, 1.0, 1.0, 0.0).unwrap();
        let schedule = derive_schedule(&other, 1e-2, 1.0).unwrap();
        assert!(matches!(
            svrgcg_run(&problem, &schedule, &ProxPolicy::Exact, 1),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn weak_rank_above_dimension_is_rejected() {
        let problem = deterministic_problem(10);
        let schedule = derive_schedule(&problem.constants, 1e-2, 1.0)
            .unwrap()
            .with_sample_free_inner();
        let cfg = WeakProxConfig::new(9, 0.1).unwrap();
        assert!(matches!(
            svrgcg_run(&problem, &schedule, &ProxPolicy::Weak(cfg), 1),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn weak_runs_track_exact_runs_on_low_rank_instances() {
        // Rank-2 target inside the ball: a rank-3 weak oracle should land on
        // (nearly) the same optimum as the exact oracle.
        let mut rng = substream(0x77, &[1]);
        let u = gaussian_matrix(6, 2, &mut rng);
        let v = gaussian_matrix(6, 2, &mut rng);
        let target = u.dot(&v.t());
        let tau = 2.0 * crate::linalg::nuclear_norm(&target).unwrap();
        let objective = matrix_estimation_objective(target, 0.0).unwrap();
        let problem =
            CompositeProblem::new(objective, None, FeasibleSet::nuclear_ball(tau).unwrap())
                .unwrap();
        let c0 = problem.original_value(&Mat::zeros((6, 6))).unwrap();
        let schedule = derive_schedule(&problem.constants, c0 / 512.0, c0)
            .unwrap()
            .with_sample_free_inner();
        let exact = svrgcg_run(&problem, &schedule, &ProxPolicy::Exact, 2).unwrap();
        let cfg = WeakProxConfig::new(3, schedule.prox_slack).unwrap();
        let weak = svrgcg_run(&problem, &schedule, &ProxPolicy::Weak(cfg), 2).unwrap();
        let scale = 1.0 + frobenius_norm(&exact.final_point);
        assert!(
            max_abs_diff(&exact.final_point, &weak.final_point) <= 1e-6 * scale,
            "weak and exact optima diverge: {}",
            max_abs_diff(&exact.final_point, &weak.final_point)
        );
        assert_eq!(weak.total_rank_one_svds(), schedule.epochs as u128 * schedule.inner_steps as u128 * 3);
    }
}
