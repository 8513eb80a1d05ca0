//! Synthetic instance generation and recovery metrics for the benchmark
//! experiments.

use ndarray::Array1;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::full_svd;
use crate::rng::{gaussian_matrix, uniform01, uniform_index};
use crate::Mat;

/// Draws the planted sparse factor: a d×r matrix whose entries are zero
/// with probability 1 − `nonzero_prob` and uniform on {1, …, 10} otherwise.
/// Returns the factor Y and the signal YYᵀ.
pub fn generate_signal(
    d: usize,
    r: usize,
    nonzero_prob: f64,
    rng: &mut ChaCha8Rng,
) -> Result<(Mat, Mat)> {
    if d == 0 || r == 0 {
        return Err(Error::Domain("signal dimensions must be positive".into()));
    }
    if !(nonzero_prob > 0.0 && nonzero_prob <= 1.0) {
        return Err(Error::Domain(format!(
            "nonzero probability must lie in (0, 1], got {nonzero_prob}"
        )));
    }
    let mut y = Mat::zeros((d, r));
    for i in 0..d {
        for j in 0..r {
            if uniform01(rng) < nonzero_prob {
                y[[i, j]] = (uniform_index(rng, 10) + 1) as f64;
            }
        }
    }
    let signal = y.dot(&y.t());
    Ok((y, signal))
}

/// Builds the noisy symmetric table observation M = yyᵀ + (c/2)(N + Nᵀ)
/// with N entrywise standard Gaussian.
pub fn build_table1_instance(y: &Array1<f64>, c: f64, rng: &mut ChaCha8Rng) -> Result<Mat> {
    if !(c >= 0.0 && c.is_finite()) {
        return Err(Error::Domain(format!("noise magnitude must be nonnegative, got {c}")));
    }
    let d = y.len();
    if d == 0 {
        return Err(Error::Domain("signal vector must be nonempty".into()));
    }
    let mut m = Mat::zeros((d, d));
    for i in 0..d {
        for j in 0..d {
            m[[i, j]] = y[i] * y[j];
        }
    }
    if c > 0.0 {
        let n = gaussian_matrix(d, d, rng);
        let half_c = 0.5 * c;
        for i in 0..d {
            for j in 0..d {
                m[[i, j]] += half_c * (n[[i, j]] + n[[j, i]]);
            }
        }
    }
    Ok(m)
}

/// Counts entries with |x_ij| > `zero_tol` and singular values above
/// `rank_tol`·σ_max.
pub fn nnz_and_rank(x: &Mat, zero_tol: f64, rank_tol: f64) -> Result<(usize, usize)> {
    if !(zero_tol > 0.0) || !(rank_tol > 0.0) {
        return Err(Error::Domain("tolerances must be positive".into()));
    }
    let nnz = x.iter().filter(|v| v.abs() > zero_tol).count();
    let svd = full_svd(x)?;
    let top = svd.singular_values.first().copied().unwrap_or(0.0);
    let rank = if top == 0.0 {
        0
    } else {
        svd.singular_values.iter().filter(|s| **s > rank_tol * top).count()
    };
    Ok((nnz, rank))
}

/// Relative singular-value cutoff used when counting numerical rank.
pub const RANK_TOL: f64 = 1e-6;

/// Entry cutoff for nonzero counting is this fraction of the largest
/// observation magnitude.
pub const ZERO_TOL_SCALE: f64 = 1e-6;

/// One trial's problem data plus the derived solve/metric parameters shared
/// by every method run on it.
#[derive(Debug, Clone)]
pub struct RecoveryInstance {
    /// Planted low-rank sparse signal the methods try to recover.
    pub signal: Mat,
    /// Observed data matrix the objective fits.
    pub observation: Mat,
    /// Trace budget of the feasible set (trace of the signal).
    pub tau: f64,
    /// Absolute accuracy target derived from the relative one.
    pub epsilon: f64,
    /// Upper bound on the objective gap at the zero starting point.
    pub initial_gap: f64,
    /// Entry cutoff for nonzero counting on this instance.
    pub zero_tol: f64,
    /// Nonzero count of the signal (the sparsity-ratio denominator).
    pub signal_nnz: usize,
}

impl RecoveryInstance {
    /// Derives the per-instance parameters from a signal/observation pair.
    /// The signal must have at least one nonzero entry.
    pub fn assemble(signal: Mat, observation: Mat, epsilon_rel: f64) -> Result<Self> {
        if signal.dim() != observation.dim() {
            return Err(Error::dims(
                format!("{}x{}", signal.nrows(), signal.ncols()),
                format!("{}x{}", observation.nrows(), observation.ncols()),
            ));
        }
        if !(epsilon_rel > 0.0 && epsilon_rel.is_finite()) {
            return Err(Error::Domain(format!(
                "relative accuracy must be positive, got {epsilon_rel}"
            )));
        }
        let max_abs = observation.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        if !(max_abs > 0.0) {
            return Err(Error::Domain("observation matrix is identically zero".into()));
        }
        let zero_tol = ZERO_TOL_SCALE * max_abs;
        let signal_nnz = signal.iter().filter(|v| v.abs() > zero_tol).count();
        if signal_nnz == 0 {
            return Err(Error::Domain("signal has no nonzero entries to recover".into()));
        }
        let tau = signal.diag().sum();
        let signal_sq: f64 = signal.iter().map(|v| v * v).sum();
        let obs_sq: f64 = observation.iter().map(|v| v * v).sum();
        Ok(RecoveryInstance {
            signal,
            observation,
            tau,
            epsilon: epsilon_rel * signal_sq,
            initial_gap: 0.5 * obs_sq,
            zero_tol,
            signal_nnz,
        })
    }

    /// Recovery metrics of a candidate: (relative error, nnz ratio, rank).
    pub fn recovery_summary(&self, x: &Mat) -> Result<(f64, f64, f64)> {
        let err = relative_error(x, &self.signal)?;
        let (nnz, rank) = nnz_and_rank(x, self.zero_tol, RANK_TOL)?;
        Ok((err, nnz as f64 / self.signal_nnz as f64, rank as f64))
    }
}

/// Squared-Frobenius relative recovery error ‖x − signal‖²_F / ‖signal‖²_F.
pub fn relative_error(x: &Mat, signal: &Mat) -> Result<f64> {
    if x.dim() != signal.dim() {
        return Err(Error::dims(
            format!("{}x{}", signal.nrows(), signal.ncols()),
            format!("{}x{}", x.nrows(), x.ncols()),
        ));
    }
    let num: f64 = x
        .iter()
        .zip(signal.iter())
        .map(|(a, b)| (a - b) * (a - b))
        .sum();
    let den: f64 = signal.iter().map(|v| v * v).sum();
    if den == 0.0 {
        return Err(Error::Domain("cannot normalize by an all-zero signal".into()));
    }
    Ok(num / den)
}
