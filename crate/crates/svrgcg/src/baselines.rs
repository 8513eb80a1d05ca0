//! Projection-free baselines: a linear minimization oracle over the
//! feasible sets plus two stochastic conditional-gradient methods to
//! compare against the variance-reduced solver.
//!
//! Both baselines share the solver's trace format so cost accounting is
//! directly comparable: every oracle call is booked as one rank-one SVD
//! equivalent, and every sampled component gradient as one stochastic
//! sample.

use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{
    frobenius_inner, frobenius_norm, truncated_svd_with_stall,
    truncated_symmetric_eigen_with_stall, SUBSPACE_STALL_REL,
};
use crate::objective::StochasticObjective;
use crate::prox::FeasibleSet;
use crate::rng::substream;
use crate::solver::{CompositeProblem, RunTrace, TraceRow};
use crate::Mat;

const SCG_STREAM: u64 = 0x5343_4731;
const SCGS_STREAM: u64 = 0x5343_4753;
const LMO_SKETCH_SEED: u64 = 0x4c4d_4f53;

/// Outcome of one linear minimization over a feasible set.
#[derive(Debug, Clone)]
pub struct LmoResult {
    /// The minimizing vertex (or the zero matrix when that is optimal or
    /// the gradient vanishes).
    pub vertex: Mat,
    /// ⟨gradient, vertex⟩ — the vertex half of the Wolfe gap
    /// ⟨gradient, x⟩ − ⟨gradient, vertex⟩.
    pub duality_gap_contribution: f64,
}

/// Minimizes ⟨gradient, V⟩ over the feasible set.
///
/// Nuclear ball: −τ·u₁v₁ᵀ from the top singular triplet of the gradient.
/// Trace-bounded PSD cone: τ·uuᵀ for the most-negative eigenvector when one
/// exists, otherwise the apex (zero matrix). A gradient of exactly zero
/// returns the zero matrix for both sets.
pub fn lmo(gradient: &Mat, set: FeasibleSet) -> Result<LmoResult> {
    crate::linalg::check_finite(gradient, "linear-oracle gradient")?;
    let tau = set.tau();
    if frobenius_norm(gradient) == 0.0 {
        return Ok(LmoResult {
            vertex: Mat::zeros(gradient.dim()),
            duality_gap_contribution: 0.0,
        });
    }
    match set {
        FeasibleSet::NuclearBall { .. } => {
            let svd = truncated_svd_with_stall(gradient, 1, LMO_SKETCH_SEED, SUBSPACE_STALL_REL)?;
            let u = svd.left_vectors.column(0);
            let v = svd.right_vectors.column(0);
            let mut vertex = Mat::zeros(gradient.dim());
            for i in 0..vertex.nrows() {
                for j in 0..vertex.ncols() {
                    vertex[[i, j]] = -tau * u[i] * v[j];
                }
            }
            let contribution = frobenius_inner(gradient, &vertex)?;
            Ok(LmoResult { vertex, duality_gap_contribution: contribution })
        }
        FeasibleSet::TracePsdCone { .. } => {
            if gradient.nrows() != gradient.ncols() {
                return Err(Error::dims(
                    "square gradient for the PSD cone",
                    format!("{}x{}", gradient.nrows(), gradient.ncols()),
                ));
            }
            let sym = 0.5 * &(gradient + &gradient.t());
            // The largest eigenvalue of −gradient is −λ_min(gradient).
            let neg = -&sym;
            let eig =
                truncated_symmetric_eigen_with_stall(&neg, 1, LMO_SKETCH_SEED, SUBSPACE_STALL_REL)?;
            if eig.values[0] <= 0.0 {
                // Gradient is PSD: the apex is optimal.
                return Ok(LmoResult {
                    vertex: Mat::zeros(gradient.dim()),
                    duality_gap_contribution: 0.0,
                });
            }
            let u = eig.vectors.column(0);
            let mut vertex = Mat::zeros(gradient.dim());
            for i in 0..vertex.nrows() {
                for j in 0..vertex.ncols() {
                    vertex[[i, j]] = tau * u[i] * u[j];
                }
            }
            let contribution = frobenius_inner(gradient, &vertex)?;
            Ok(LmoResult { vertex, duality_gap_contribution: contribution })
        }
    }
}

/// Iteration budget and batch policy for the baseline runners.
#[derive(Debug, Clone, Copy)]
pub struct BaselineConfig {
    /// Number of outer iterations to run.
    pub iterations: u64,
    /// Ceiling on any per-iteration sample batch.
    pub batch_cap: u64,
    /// Record real wall-clock times (off keeps traces byte-reproducible).
    pub measure_time: bool,
}

impl BaselineConfig {
    pub fn new(iterations: u64) -> Result<Self> {
        if iterations < 1 {
            return Err(Error::Domain("baseline runs need at least one iteration".into()));
        }
        Ok(BaselineConfig { iterations, batch_cap: 10_000, measure_time: false })
    }

    pub fn with_batch_cap(mut self, cap: u64) -> Result<Self> {
        if cap < 1 {
            return Err(Error::Domain("batch cap must be at least 1".into()));
        }
        self.batch_cap = cap;
        Ok(self)
    }
}

/// Per-iteration observation for baseline runs.
pub struct BaselineStepEvent<'a> {
    pub iteration: u64,
    /// Wolfe gap ⟨direction, x − v⟩ measured with this step's direction.
    pub wolfe_gap: f64,
    pub iterate: &'a Mat,
}

/// Stochastic conditional gradient: step 2/(t+1) toward the oracle vertex,
/// with sample batches growing as t² (capped).
pub fn scg_run<O: StochasticObjective>(
    problem: &CompositeProblem<O>,
    config: &BaselineConfig,
    seed: u64,
) -> Result<RunTrace> {
    scg_run_observed(problem, config, seed, &mut |_| {})
}

/// [`scg_run`] reporting each step to `observer`.
pub fn scg_run_observed<O: StochasticObjective>(
    problem: &CompositeProblem<O>,
    config: &BaselineConfig,
    seed: u64,
    observer: &mut dyn FnMut(&BaselineStepEvent),
) -> Result<RunTrace> {
    let shape = problem.objective.shape();
    let mut x = Mat::zeros(shape);
    let initial_f = problem.original_value(&x)?;
    let initial_f_mu = problem.smoothed_value(&x)?;
    let start = std::time::Instant::now();

    let mut rows = Vec::with_capacity(config.iterations as usize);
    let mut cum_samples: u128 = 0;
    let mut cum_rank_one: u128 = 0;

    for t in 1..=config.iterations {
        let eta = 2.0 / (t + 1) as f64;
        let batch = (t.saturating_mul(t)).min(config.batch_cap);
        let mut rng: ChaCha8Rng = substream(seed, &[SCG_STREAM, t]);
        let mut direction =
            problem.objective.batch_mean_gradient(&x, batch as usize, &mut rng)?;
        cum_samples += batch as u128;
        if let Some(term) = &problem.smooth_term {
            direction += &term.gradient(&x)?;
        }
        let oracle = lmo(&direction, problem.set)?;
        cum_rank_one += 1;
        let wolfe_gap =
            frobenius_inner(&direction, &x)? - oracle.duality_gap_contribution;
        x = (1.0 - eta) * &x + eta * &oracle.vertex;
        observer(&BaselineStepEvent { iteration: t, wolfe_gap, iterate: &x });
        rows.push(TraceRow {
            epoch: 1,
            inner_step: t,
            f: problem.original_value(&x)?,
            f_mu: problem.smoothed_value(&x)?,
            stoch_grads: cum_samples,
            rank1_svd_equiv: cum_rank_one,
            wall_seconds: if config.measure_time { start.elapsed().as_secs_f64() } else { 0.0 },
        });
    }

    Ok(RunTrace {
        rows,
        initial_f,
        initial_f_mu,
        snapshot_batches: Vec::new(),
        snapshot_cap_hit: false,
        final_point: x,
    })
}

/// Stochastic conditional gradient sliding: accelerated outer sequence with
/// an inner conditional-gradient loop solving each proximal subproblem to a
/// decaying accuracy, so oracle calls are spent only where needed.
///
/// Sequences per outer step t: mixing weight 3/(t+2), proximal strength
/// 3L/(t+1), inner-loop exit threshold L·D²/(t·(t+1)), and sample batches
/// σ²(t+2)³/(L·D)² clamped to [1, cap], with D² the squared set diameter.
/// The inner loop is additionally capped at min(rows, cols) oracle calls.
pub fn scgs_run<O: StochasticObjective>(
    problem: &CompositeProblem<O>,
    config: &BaselineConfig,
    seed: u64,
) -> Result<RunTrace> {
    let shape = problem.objective.shape();
    let smooth_l = problem.constants.smoothness();
    let sigma = problem.constants.noise_bound;
    let diameter_sq = problem.set.diameter_sq();
    let inner_cap = shape.0.min(shape.1) as u64;

    let mut x = Mat::zeros(shape);
    let mut y = Mat::zeros(shape);
    let initial_f = problem.original_value(&y)?;
    let initial_f_mu = problem.smoothed_value(&y)?;
    let start = std::time::Instant::now();

    let mut rows = Vec::with_capacity(config.iterations as usize);
    let mut cum_samples: u128 = 0;
    let mut cum_rank_one: u128 = 0;

    for t in 1..=config.iterations {
        let tf = t as f64;
        let gamma = 3.0 / (tf + 2.0);
        let prox_strength = 3.0 * smooth_l / (tf + 1.0);
        let exit_threshold = smooth_l * diameter_sq / (tf * (tf + 1.0));
        let batch = if sigma == 0.0 {
            1
        } else {
            let raw = sigma * sigma * (tf + 2.0).powi(3) / (smooth_l * smooth_l * diameter_sq);
            (raw.ceil() as u64).clamp(1, config.batch_cap)
        };

        let z = (1.0 - gamma) * &y + gamma * &x;
        let mut rng: ChaCha8Rng = substream(seed, &[SCGS_STREAM, t]);
        let mut direction =
            problem.objective.batch_mean_gradient(&z, batch as usize, &mut rng)?;
        cum_samples += batch as u128;
        if let Some(term) = &problem.smooth_term {
            direction += &term.gradient(&z)?;
        }

        // Inner conditional-gradient loop on
        //   u ↦ ⟨direction, u⟩ + (prox_strength/2)·‖u − x‖²
        let anchor = x.clone();
        let mut u = x;
        for _ in 0..inner_cap {
            let sub_grad = &direction + &(prox_strength * &(&u - &anchor));
            let oracle = lmo(&sub_grad, problem.set)?;
            cum_rank_one += 1;
            let gap = frobenius_inner(&sub_grad, &u)? - oracle.duality_gap_contribution;
            if gap <= exit_threshold {
                break;
            }
            let dist_sq = {
                let d = &oracle.vertex - &u;
                frobenius_norm(&d).powi(2)
            };
            if dist_sq == 0.0 {
                break;
            }
            let theta = (gap / (prox_strength * dist_sq)).min(1.0);
            u = (1.0 - theta) * &u + theta * &oracle.vertex;
        }
        x = u;
        y = (1.0 - gamma) * &y + gamma * &x;

        rows.push(TraceRow {
            epoch: 1,
            inner_step: t,
            f: problem.original_value(&y)?,
            f_mu: problem.smoothed_value(&y)?,
            stoch_grads: cum_samples,
            rank1_svd_equiv: cum_rank_one,
            wall_seconds: if config.measure_time { start.elapsed().as_secs_f64() } else { 0.0 },
        });
    }

    Ok(RunTrace {
        rows,
        initial_f,
        initial_f_mu,
        snapshot_batches: Vec::new(),
        snapshot_cap_hit: false,
        final_point: y,
    })
}
