//! Stochastic and finite-sum first-order oracles with snapshot-based
//! variance reduction.
//!
//! The solver consumes objectives through [`StochasticObjective`], whose
//! batch operations draw *matched* samples at two points so the
//! variance-reduced estimator
//!
//! ```text
//! ∇̂g = (1/k)·Σᵢ (∇g⁽ⁱ⁾(x) − ∇g⁽ⁱ⁾(snapshot)) + ∇̃g(snapshot)
//! ```
//!
//! is unbiased for ∇G(x) with variance vanishing as x approaches the
//! snapshot. All sampling is driven by explicit counter-based RNG streams,
//! so every estimate is replayable.
//!
//! For the matrix-estimation family the per-sample difference
//! ∇g⁽ⁱ⁾(x) − ∇g⁽ⁱ⁾(snapshot) = x − snapshot is sample-independent; passing
//! an inner batch size of zero selects that sample-free path explicitly.

use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::check_finite;
use crate::rng::{gaussian_matrix, uniform_index};
use crate::Mat;

/// Snapshot data shared by all inner steps of an epoch.
#[derive(Debug, Clone)]
pub struct VrGradientState {
    pub snapshot_point: Mat,
    pub snapshot_gradient: Mat,
    /// Stochastic samples consumed to build the snapshot (component count
    /// for finite sums, zero for exact paths).
    pub snapshot_sample_count: u64,
}

/// One variance-reduced gradient estimate.
#[derive(Debug, Clone)]
pub struct GradientEstimate {
    pub gradient: Mat,
    pub samples_used: u64,
    /// Within-batch sample variance of the per-sample estimates (Frobenius),
    /// available when at least two samples were drawn.
    pub empirical_variance_proxy: Option<f64>,
}

/// A smooth stochastic objective G = E[g], presented through batch-level
/// gradient operations so implementations can exploit structure (for
/// example collapsing a Gaussian sample mean into a single draw).
pub trait StochasticObjective: Send + Sync {
    fn shape(&self) -> (usize, usize);

    /// Smoothness constant β_G valid for every sampled component.
    fn smoothness(&self) -> f64;

    /// Noise bound σ with E‖∇G(x) − ∇g(x)‖² ≤ σ².
    fn noise_bound(&self) -> f64;

    /// Strong convexity contributed by G (zero if none).
    fn strong_convexity(&self) -> f64;

    fn exact_value(&self, x: &Mat) -> Result<f64>;

    fn exact_gradient(&self, x: &Mat) -> Result<Mat>;

    /// Mean of `k` freshly sampled component gradients at `x`.
    fn batch_mean_gradient(&self, x: &Mat, k: usize, rng: &mut ChaCha8Rng) -> Result<Mat>;

    /// Mean of ∇g⁽ⁱ⁾(x) − ∇g⁽ⁱ⁾(snapshot) over `k` *matched* samples, plus
    /// the within-batch sample variance of the per-sample differences when
    /// k ≥ 2.
    fn batch_pair_difference(
        &self,
        x: &Mat,
        snapshot: &Mat,
        k: usize,
        rng: &mut ChaCha8Rng,
    ) -> Result<(Mat, Option<f64>)>;

    /// The per-sample difference when it does not depend on the sample
    /// (matrix estimation: always x − snapshot). `None` for objectives
    /// whose differences genuinely vary.
    fn exact_pair_difference(&self, x: &Mat, snapshot: &Mat) -> Option<Mat> {
        let _ = (x, snapshot);
        None
    }

    /// Number of components for explicitly given finite sums.
    fn component_count(&self) -> Option<usize> {
        None
    }
}

/// Snapshot gradient: the exact average for finite sums (sample budget is
/// ignored), the mean of `k_s` sampled gradients otherwise. A budget of zero
/// on a sampling oracle selects the exact-gradient degenerate path (the
/// schedule produces it when the noise bound is zero).
pub fn snapshot_gradient(
    obj: &impl StochasticObjective,
    x: &Mat,
    k_s: u64,
    rng: &mut ChaCha8Rng,
) -> Result<VrGradientState> {
    check_finite(x, "snapshot point")?;
    let (gradient, count) = if let Some(n) = obj.component_count() {
        (obj.exact_gradient(x)?, n as u64)
    } else if k_s == 0 {
        (obj.exact_gradient(x)?, 0)
    } else {
        (obj.batch_mean_gradient(x, k_s as usize, rng)?, k_s)
    };
    Ok(VrGradientState {
        snapshot_point: x.clone(),
        snapshot_gradient: gradient,
        snapshot_sample_count: count,
    })
}

/// Variance-reduced estimator at `x` given the epoch snapshot.
///
/// `k_t = 0` explicitly requests the sample-free path and errors when the
/// objective cannot provide an exact pair difference; `k_t ≥ 1` always takes
/// the sampled path so gradient accounting stays exact.
pub fn vr_gradient(
    obj: &impl StochasticObjective,
    state: &VrGradientState,
    x: &Mat,
    k_t: u64,
    rng: &mut ChaCha8Rng,
) -> Result<GradientEstimate> {
    if x.dim() != state.snapshot_point.dim() {
        return Err(Error::dims(
            format!("{}x{}", state.snapshot_point.nrows(), state.snapshot_point.ncols()),
            format!("{}x{}", x.nrows(), x.ncols()),
        ));
    }
    if k_t == 0 {
        let Some(diff) = obj.exact_pair_difference(x, &state.snapshot_point) else {
            return Err(Error::Config(
                "inner batch size 0 requires an objective with sample-independent \
                 gradient differences"
                    .into(),
            ));
        };
        return Ok(GradientEstimate {
            gradient: diff + &state.snapshot_gradient,
            samples_used: 0,
            empirical_variance_proxy: None,
        });
    }
    let (mean_diff, proxy) =
        obj.batch_pair_difference(x, &state.snapshot_point, k_t as usize, rng)?;
    Ok(GradientEstimate {
        gradient: mean_diff + &state.snapshot_gradient,
        samples_used: k_t,
        empirical_variance_proxy: proxy,
    })
}

/// G(X) = E[½‖X − M⁽ⁱ⁾‖²] − const with observations M⁽ⁱ⁾ = M₀ + σ·Q⁽ⁱ⁾,
/// Q⁽ⁱ⁾ entrywise standard Gaussian. Sampled gradients are X − M⁽ⁱ⁾; the
/// exact gradient is X − M₀; reported values drop the additive noise
/// constant, i.e. `exact_value` = ½‖X − M₀‖².
#[derive(Debug, Clone)]
pub struct MatrixEstimation {
    pub mean_matrix: Mat,
    pub noise_sigma: f64,
}

impl MatrixEstimation {
    pub fn new(mean_matrix: Mat, noise_sigma: f64) -> Result<Self> {
        check_finite(&mean_matrix, "observation mean")?;
        if !(noise_sigma >= 0.0 && noise_sigma.is_finite()) {
            return Err(Error::Domain(format!(
                "observation noise level must be nonnegative, got {noise_sigma}"
            )));
        }
        Ok(MatrixEstimation { mean_matrix, noise_sigma })
    }
}

/// Builds the matrix-estimation objective around a mean observation.
pub fn matrix_estimation_objective(mean_matrix: Mat, noise_sigma: f64) -> Result<MatrixEstimation> {
    MatrixEstimation::new(mean_matrix, noise_sigma)
}

impl StochasticObjective for MatrixEstimation {
    fn shape(&self) -> (usize, usize) {
        self.mean_matrix.dim()
    }

    fn smoothness(&self) -> f64 {
        1.0
    }

    fn noise_bound(&self) -> f64 {
        let (m, n) = self.mean_matrix.dim();
        self.noise_sigma * ((m * n) as f64).sqrt()
    }

    fn strong_convexity(&self) -> f64 {
        1.0
    }

    fn exact_value(&self, x: &Mat) -> Result<f64> {
        let diff = x - &self.mean_matrix;
        Ok(0.5 * diff.iter().map(|v| v * v).sum::<f64>())
    }

    fn exact_gradient(&self, x: &Mat) -> Result<Mat> {
        Ok(x - &self.mean_matrix)
    }

    fn batch_mean_gradient(&self, x: &Mat, k: usize, rng: &mut ChaCha8Rng) -> Result<Mat> {
        if k == 0 {
            return Err(Error::Domain("batch size must be at least 1".into()));
        }
        let mut grad = x - &self.mean_matrix;
        if self.noise_sigma > 0.0 {
            // The mean of k i.i.d. Gaussian noise matrices is itself Gaussian
            // with scale σ/√k: draw it directly instead of k times.
            let (m, n) = self.mean_matrix.dim();
            let noise = gaussian_matrix(m, n, rng);
            let scale = self.noise_sigma / (k as f64).sqrt();
            grad.zip_mut_with(&noise, |g, &q| *g -= scale * q);
        }
        Ok(grad)
    }

    fn batch_pair_difference(
        &self,
        x: &Mat,
        snapshot: &Mat,
        k: usize,
        _rng: &mut ChaCha8Rng,
    ) -> Result<(Mat, Option<f64>)> {
        if k == 0 {
            return Err(Error::Domain("batch size must be at least 1".into()));
        }
        // Matched samples share their observation, so every per-sample
        // difference equals x − snapshot and the batch variance is zero.
        let diff = x - snapshot;
        let proxy = if k >= 2 { Some(0.0) } else { None };
        Ok((diff, proxy))
    }

    fn exact_pair_difference(&self, x: &Mat, snapshot: &Mat) -> Option<Mat> {
        Some(x - snapshot)
    }
}

/// One component of an explicitly given finite sum.
pub trait ComponentGradient: Send + Sync {
    fn value(&self, x: &Mat) -> f64;
    fn gradient(&self, x: &Mat) -> Mat;
    /// Smoothness of this component.
    fn smoothness(&self) -> f64;
    /// Strong convexity of this component (zero if none).
    fn strong_convexity(&self) -> f64 {
        0.0
    }
}

/// (scale/2)·‖X − target‖²: the workhorse quadratic component.
#[derive(Debug, Clone)]
pub struct QuadraticComponent {
    pub scale: f64,
    pub target: Mat,
}

impl QuadraticComponent {
    pub fn new(scale: f64, target: Mat) -> Result<Self> {
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::Domain(format!("quadratic scale must be positive, got {scale}")));
        }
        check_finite(&target, "quadratic target")?;
        Ok(QuadraticComponent { scale, target })
    }
}

impl ComponentGradient for QuadraticComponent {
    fn value(&self, x: &Mat) -> f64 {
        let diff = x - &self.target;
        0.5 * self.scale * diff.iter().map(|v| v * v).sum::<f64>()
    }

    fn gradient(&self, x: &Mat) -> Mat {
        self.scale * &(x - &self.target)
    }

    fn smoothness(&self) -> f64 {
        self.scale
    }

    fn strong_convexity(&self) -> f64 {
        self.scale
    }
}

/// G(X) = (1/n)·Σ gᵢ(X) over explicitly stored components. Snapshots use
/// the exact average (zero variance); inner batches sample components
/// uniformly with replacement.
pub struct FiniteSumObjective<C: ComponentGradient> {
    components: Vec<C>,
    shape: (usize, usize),
}

impl<C: ComponentGradient> FiniteSumObjective<C> {
    pub fn new(components: Vec<C>, shape: (usize, usize)) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::Domain("a finite sum needs at least one component".into()));
        }
        Ok(FiniteSumObjective { components, shape })
    }

    pub fn n(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[C] {
        &self.components
    }
}

impl<C: ComponentGradient> StochasticObjective for FiniteSumObjective<C> {
    fn shape(&self) -> (usize, usize) {
        self.shape
    }

    fn smoothness(&self) -> f64 {
        self.components
            .iter()
            .map(|c| c.smoothness())
            .fold(0.0, f64::max)
    }

    /// Finite-sum runs take exact snapshots, so the sampling-noise bound
    /// never enters their schedule; zero keeps the snapshot budget empty.
    fn noise_bound(&self) -> f64 {
        0.0
    }

    fn strong_convexity(&self) -> f64 {
        // The average of αᵢ-strongly-convex components is (mean αᵢ)-strongly
        // convex.
        self.components
            .iter()
            .map(|c| c.strong_convexity())
            .sum::<f64>()
            / self.n() as f64
    }

    fn exact_value(&self, x: &Mat) -> Result<f64> {
        check_finite(x, "finite-sum query point")?;
        Ok(self.components.iter().map(|c| c.value(x)).sum::<f64>() / self.n() as f64)
    }

    fn exact_gradient(&self, x: &Mat) -> Result<Mat> {
        check_finite(x, "finite-sum query point")?;
        let mut grad = Mat::zeros(self.shape);
        for c in &self.components {
            grad += &c.gradient(x);
        }
        Ok(grad / self.n() as f64)
    }

    fn batch_mean_gradient(&self, x: &Mat, k: usize, rng: &mut ChaCha8Rng) -> Result<Mat> {
        if k == 0 {
            return Err(Error::Domain("batch size must be at least 1".into()));
        }
        let mut grad = Mat::zeros(self.shape);
        for _ in 0..k {
            let idx = uniform_index(rng, self.n());
            grad += &self.components[idx].gradient(x);
        }
        Ok(grad / k as f64)
    }

    fn batch_pair_difference(
        &self,
        x: &Mat,
        snapshot: &Mat,
        k: usize,
        rng: &mut ChaCha8Rng,
    ) -> Result<(Mat, Option<f64>)> {
        if k == 0 {
            return Err(Error::Domain("batch size must be at least 1".into()));
        }
        let mut diffs = Vec::with_capacity(k);
        let mut mean = Mat::zeros(self.shape);
        for _ in 0..k {
            let idx = uniform_index(rng, self.n());
            let d = self.components[idx].gradient(x) - self.components[idx].gradient(snapshot);
            mean += &d;
            diffs.push(d);
        }
        mean /= k as f64;
        let proxy = if k >= 2 {
            let ss: f64 = diffs
                .iter()
                .map(|d| {
                    d.iter()
                        .zip(mean.iter())
                        .map(|(a, b)| (a - b) * (a - b))
                        .sum::<f64>()
                })
                .sum();
            Some(ss / (k - 1) as f64)
        } else {
            None
        };
        Ok((mean, proxy))
    }

    fn component_count(&self) -> Option<usize> {
        Some(self.n())
    }
}

/// Synthetic sampling oracle for tests and demos: components are
/// (a/2)·‖X − center‖² with the curvature a drawn uniformly from a finite
/// menu, plus additive Gaussian gradient noise. The matched-sample
/// difference a·(x − snapshot) varies with the draw, exercising the generic
/// variance-reduction path.
#[derive(Debug, Clone)]
pub struct StochasticQuadratic {
    pub center: Mat,
    pub scale_choices: Vec<f64>,
    pub gradient_noise: f64,
    /// Caller-supplied bound σ on E‖∇G − ∇g‖² over the region of interest.
    pub noise_bound: f64,
}

impl StochasticQuadratic {
    pub fn new(
        center: Mat,
        scale_choices: Vec<f64>,
        gradient_noise: f64,
        noise_bound: f64,
    ) -> Result<Self> {
        check_finite(&center, "quadratic center")?;
        if scale_choices.is_empty() || scale_choices.iter().any(|a| !(*a > 0.0 && a.is_finite())) {
            return Err(Error::Domain("curvature menu must be nonempty and positive".into()));
        }
        if !(gradient_noise >= 0.0) || !(noise_bound >= 0.0) {
            return Err(Error::Domain("noise levels must be nonnegative".into()));
        }
        Ok(StochasticQuadratic { center, scale_choices, gradient_noise, noise_bound })
    }

    fn mean_scale(&self) -> f64 {
        self.scale_choices.iter().sum::<f64>() / self.scale_choices.len() as f64
    }
}

impl StochasticObjective for StochasticQuadratic {
    fn shape(&self) -> (usize, usize) {
        self.center.dim()
    }

    fn smoothness(&self) -> f64 {
        self.scale_choices.iter().cloned().fold(0.0, f64::max)
    }

    fn noise_bound(&self) -> f64 {
        self.noise_bound
    }

    fn strong_convexity(&self) -> f64 {
        self.mean_scale()
    }

    fn exact_value(&self, x: &Mat) -> Result<f64> {
        let diff = x - &self.center;
        Ok(0.5 * self.mean_scale() * diff.iter().map(|v| v * v).sum::<f64>())
    }

    fn exact_gradient(&self, x: &Mat) -> Result<Mat> {
        Ok(self.mean_scale() * &(x - &self.center))
    }

    fn batch_mean_gradient(&self, x: &Mat, k: usize, rng: &mut ChaCha8Rng) -> Result<Mat> {
        if k == 0 {
            return Err(Error::Domain("batch size must be at least 1".into()));
        }
        let mut scale_sum = 0.0;
        for _ in 0..k {
            scale_sum += self.scale_choices[uniform_index(rng, self.scale_choices.len())];
        }
        let mut grad = (scale_sum / k as f64) * &(x - &self.center);
        if self.gradient_noise > 0.0 {
            let (m, n) = self.shape();
            let noise = gaussian_matrix(m, n, rng);
            let s = self.gradient_noise / (k as f64).sqrt();
            grad.zip_mut_with(&noise, |g, &q| *g += s * q);
        }
        Ok(grad)
    }

    fn batch_pair_difference(
        &self,
        x: &Mat,
        snapshot: &Mat,
        k: usize,
        rng: &mut ChaCha8Rng,
    ) -> Result<(Mat, Option<f64>)> {
        if k == 0 {
            return Err(Error::Domain("batch size must be at least 1".into()));
        }
        // Additive noise is shared by the matched evaluations and cancels;
        // only the curvature draw survives in the difference.
        let step = x - snapshot;
        let step_sq: f64 = step.iter().map(|v| v * v).sum();
        let mut scales = Vec::with_capacity(k);
        for _ in 0..k {
            scales.push(self.scale_choices[uniform_index(rng, self.scale_choices.len())]);
        }
        let mean_scale = scales.iter().sum::<f64>() / k as f64;
        let proxy = if k >= 2 {
            let ss: f64 = scales.iter().map(|a| (a - mean_scale) * (a - mean_scale)).sum();
            Some(ss / (k - 1) as f64 * step_sq)
        } else {
            None
        };
        Ok((mean_scale * &step, proxy))
    }
}
