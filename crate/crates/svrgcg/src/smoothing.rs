//! Smoothed surrogates for nonsmooth regularizers.
//!
//! A term R is *smoothable with parameters (θ, γ₁, γ₂, K)* when for every
//! μ > 0 there is a continuously differentiable R_μ with
//!
//! ```text
//! R(x) − γ₁·μ  ≤  R_μ(x)  ≤  R(x) + γ₂·μ          (two-sided sandwich)
//! ‖∇R_μ(x) − ∇R_μ(y)‖ ≤ (K + θ/μ)·‖x − y‖          (smoothness β_R)
//! ```
//!
//! Three concrete instances are provided: the Huber-smoothed entrywise l1
//! norm (underestimates: γ₂ = 0), the soft-max of affine forms
//! (overestimates: γ₁ = 0), and the elastic net (Huber plus an exact
//! quadratic that also contributes strong convexity 2λ₂).

use crate::error::{Error, Result};
use crate::linalg::{check_finite, frobenius_inner, frobenius_norm, symmetric_eigen};
use crate::Mat;

/// The smoothing parameters (θ, γ₁, γ₂, K) of a term together with the
/// chosen μ; `beta_r` = K + θ/μ is the gradient Lipschitz constant of R_μ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoothableSpec {
    pub theta: f64,
    pub gamma1: f64,
    pub gamma2: f64,
    /// The μ-independent additive part K of the Lipschitz constant.
    pub base_lipschitz: f64,
    pub mu: f64,
}

impl SmoothableSpec {
    /// Total sandwich width multiplier γ = γ₁ + γ₂.
    pub fn gamma(&self) -> f64 {
        self.gamma1 + self.gamma2
    }

    /// Gradient Lipschitz constant β_R = K + θ/μ of the smoothed term.
    pub fn beta_r(&self) -> f64 {
        self.base_lipschitz + self.theta / self.mu
    }
}

/// One-dimensional Huber function: t²/(2μ) inside [−μ, μ], |t| − μ/2 outside.
/// Continuously differentiable, underestimates |t| by at most μ/2.
pub fn huber_value(t: f64, mu: f64) -> f64 {
    debug_assert!(mu > 0.0);
    if t.abs() <= mu {
        t * t / (2.0 * mu)
    } else {
        t.abs() - mu / 2.0
    }
}

/// λ·Σᵢⱼ H_μ(Xᵢⱼ) — the Huber-smoothed entrywise l1 norm λ‖X‖₁.
#[derive(Debug, Clone, PartialEq)]
pub struct HuberL1 {
    pub lambda: f64,
    pub mu: f64,
    pub shape: (usize, usize),
}

impl HuberL1 {
    pub fn new(lambda: f64, mu: f64, shape: (usize, usize)) -> Result<Self> {
        if !(lambda >= 0.0 && lambda.is_finite()) {
            return Err(Error::Domain(format!("l1 weight must be nonnegative, got {lambda}")));
        }
        if !(mu > 0.0 && mu.is_finite()) {
            return Err(Error::Domain(format!("smoothing parameter must be positive, got {mu}")));
        }
        if shape.0 == 0 || shape.1 == 0 {
            return Err(Error::Domain("matrix shape must be nonempty".into()));
        }
        Ok(HuberL1 { lambda, mu, shape })
    }

    fn check_shape(&self, x: &Mat) -> Result<()> {
        if x.dim() != self.shape {
            return Err(Error::dims(
                format!("{}x{}", self.shape.0, self.shape.1),
                format!("{}x{}", x.nrows(), x.ncols()),
            ));
        }
        Ok(())
    }

    pub fn value(&self, x: &Mat) -> Result<f64> {
        self.check_shape(x)?;
        Ok(self.lambda * x.iter().map(|&t| huber_value(t, self.mu)).sum::<f64>())
    }

    /// Entrywise λ·clamp(Xᵢⱼ/μ, −1, 1): odd in X and bounded by λ.
    pub fn gradient(&self, x: &Mat) -> Result<Mat> {
        self.check_shape(x)?;
        Ok(x.mapv(|t| self.lambda * (t / self.mu).clamp(-1.0, 1.0)))
    }

    /// Exact value of the nonsmooth original: λ‖X‖₁.
    pub fn nonsmooth_value(&self, x: &Mat) -> Result<f64> {
        self.check_shape(x)?;
        Ok(self.lambda * x.iter().map(|t| t.abs()).sum::<f64>())
    }

    pub fn spec(&self) -> SmoothableSpec {
        let (m, d) = self.shape;
        SmoothableSpec {
            theta: self.lambda,
            gamma1: self.lambda * (m * d) as f64 / 2.0,
            gamma2: 0.0,
            base_lipschitz: 0.0,
            mu: self.mu,
        }
    }
}

/// μ·log Σᵢ exp((⟨Aᵢ,X⟩ − bᵢ)/μ) — the soft maximum of n affine forms,
/// overestimating maxᵢ(⟨Aᵢ,X⟩ − bᵢ) by at most μ·log n. Evaluation is
/// overflow-safe via max-shifting of the exponents.
#[derive(Debug, Clone)]
pub struct LogSumExpMax {
    pub constraint_matrices: Vec<Mat>,
    pub offsets: Vec<f64>,
    pub mu: f64,
    /// Operator norm of the stacked linear map X ↦ (⟨Aᵢ,X⟩)ᵢ, computed once
    /// at construction as √λ_max of the Gram matrix ⟨Aᵢ,Aⱼ⟩.
    pub operator_norm: f64,
}

impl LogSumExpMax {
    pub fn new(constraint_matrices: Vec<Mat>, offsets: Vec<f64>, mu: f64) -> Result<Self> {
        if constraint_matrices.is_empty() {
            return Err(Error::Domain("need at least one affine form".into()));
        }
        if constraint_matrices.len() != offsets.len() {
            return Err(Error::dims(
                format!("{} offsets", constraint_matrices.len()),
                format!("{} offsets", offsets.len()),
            ));
        }
        if !(mu > 0.0 && mu.is_finite()) {
            return Err(Error::Domain(format!("smoothing parameter must be positive, got {mu}")));
        }
        let shape = constraint_matrices[0].dim();
        for (i, a) in constraint_matrices.iter().enumerate() {
            check_finite(a, "affine-form matrix")?;
            if a.dim() != shape {
                return Err(Error::dims(
                    format!("{}x{}", shape.0, shape.1),
                    format!("{}x{} (matrix {i})", a.nrows(), a.ncols()),
                ));
            }
        }
        if offsets.iter().any(|b| !b.is_finite()) {
            return Err(Error::Domain("offsets must be finite".into()));
        }
        let n = constraint_matrices.len();
        let mut gram = Mat::zeros((n, n));
        for i in 0..n {
            for j in i..n {
                let g = frobenius_inner(&constraint_matrices[i], &constraint_matrices[j])?;
                gram[[i, j]] = g;
                gram[[j, i]] = g;
            }
        }
        let top = symmetric_eigen(&gram)?.values[0].max(0.0);
        Ok(LogSumExpMax {
            constraint_matrices,
            offsets,
            mu,
            operator_norm: top.sqrt(),
        })
    }

    pub fn n_terms(&self) -> usize {
        self.constraint_matrices.len()
    }

    pub fn shape(&self) -> (usize, usize) {
        self.constraint_matrices[0].dim()
    }

    fn check_shape(&self, x: &Mat) -> Result<()> {
        if x.dim() != self.shape() {
            return Err(Error::dims(
                format!("{}x{}", self.shape().0, self.shape().1),
                format!("{}x{}", x.nrows(), x.ncols()),
            ));
        }
        Ok(())
    }

    /// The affine values aᵢ = ⟨Aᵢ,X⟩ − bᵢ.
    fn affine_values(&self, x: &Mat) -> Result<Vec<f64>> {
        self.constraint_matrices
            .iter()
            .zip(&self.offsets)
            .map(|(a, b)| Ok(frobenius_inner(a, x)? - b))
            .collect()
    }

    pub fn value(&self, x: &Mat) -> Result<f64> {
        self.check_shape(x)?;
        let a = self.affine_values(x)?;
        let amax = a.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let total: f64 = a.iter().map(|ai| ((ai - amax) / self.mu).exp()).sum();
        Ok(amax + self.mu * total.ln())
    }

    /// Softmax-weighted combination Σ wᵢ·Aᵢ of the constraint matrices.
    pub fn gradient(&self, x: &Mat) -> Result<Mat> {
        self.check_shape(x)?;
        let a = self.affine_values(x)?;
        let amax = a.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let weights: Vec<f64> = a.iter().map(|ai| ((ai - amax) / self.mu).exp()).collect();
        let total: f64 = weights.iter().sum();
        let mut grad = Mat::zeros(self.shape());
        for (w, mat) in weights.iter().zip(&self.constraint_matrices) {
            grad.zip_mut_with(mat, |g, &m| *g += (w / total) * m);
        }
        Ok(grad)
    }

    /// Exact value of the nonsmooth original: maxᵢ(⟨Aᵢ,X⟩ − bᵢ).
    pub fn nonsmooth_value(&self, x: &Mat) -> Result<f64> {
        self.check_shape(x)?;
        Ok(self
            .affine_values(x)?
            .into_iter()
            .fold(f64::NEG_INFINITY, f64::max))
    }

    pub fn spec(&self) -> SmoothableSpec {
        SmoothableSpec {
            theta: self.operator_norm * self.operator_norm,
            gamma1: 0.0,
            gamma2: (self.n_terms() as f64).ln(),
            base_lipschitz: 0.0,
            mu: self.mu,
        }
    }
}

/// λ₁‖X‖₁ + λ₂‖X‖²_F with the l1 part Huber-smoothed. The quadratic part is
/// exact (it is already smooth) and makes the term 2λ₂-strongly convex.
#[derive(Debug, Clone, PartialEq)]
pub struct ElasticNet {
    pub lambda1: f64,
    pub lambda2: f64,
    pub huber: HuberL1,
}

impl ElasticNet {
    pub fn new(lambda1: f64, lambda2: f64, mu: f64, shape: (usize, usize)) -> Result<Self> {
        if !(lambda2 > 0.0 && lambda2.is_finite()) {
            return Err(Error::Domain(format!(
                "quadratic weight must be positive (it supplies strong convexity), got {lambda2}"
            )));
        }
        Ok(ElasticNet {
            lambda1,
            lambda2,
            huber: HuberL1::new(lambda1, mu, shape)?,
        })
    }

    pub fn value(&self, x: &Mat) -> Result<f64> {
        Ok(self.huber.value(x)? + self.lambda2 * frobenius_norm(x).powi(2))
    }

    pub fn gradient(&self, x: &Mat) -> Result<Mat> {
        let mut g = self.huber.gradient(x)?;
        g.zip_mut_with(x, |gi, &xi| *gi += 2.0 * self.lambda2 * xi);
        Ok(g)
    }

    pub fn nonsmooth_value(&self, x: &Mat) -> Result<f64> {
        Ok(self.huber.nonsmooth_value(x)? + self.lambda2 * frobenius_norm(x).powi(2))
    }

    pub fn spec(&self) -> SmoothableSpec {
        let base = self.huber.spec();
        SmoothableSpec {
            base_lipschitz: 2.0 * self.lambda2,
            ..base
        }
    }
}

/// A smoothable nonsmooth term, dispatching to one of the three instances.
#[derive(Debug, Clone)]
pub enum SmoothTerm {
    Huber(HuberL1),
    LogSumExp(LogSumExpMax),
    ElasticNet(ElasticNet),
}

impl SmoothTerm {
    pub fn shape(&self) -> (usize, usize) {
        match self {
            SmoothTerm::Huber(h) => h.shape,
            SmoothTerm::LogSumExp(l) => l.shape(),
            SmoothTerm::ElasticNet(e) => e.huber.shape,
        }
    }

    /// Value of the smoothed term R_μ at x.
    pub fn value(&self, x: &Mat) -> Result<f64> {
        match self {
            SmoothTerm::Huber(h) => h.value(x),
            SmoothTerm::LogSumExp(l) => l.value(x),
            SmoothTerm::ElasticNet(e) => e.value(x),
        }
    }

    /// Gradient of the smoothed term R_μ at x.
    pub fn gradient(&self, x: &Mat) -> Result<Mat> {
        match self {
            SmoothTerm::Huber(h) => h.gradient(x),
            SmoothTerm::LogSumExp(l) => l.gradient(x),
            SmoothTerm::ElasticNet(e) => e.gradient(x),
        }
    }

    /// Exact value of the original nonsmooth term R at x.
    pub fn nonsmooth_value(&self, x: &Mat) -> Result<f64> {
        match self {
            SmoothTerm::Huber(h) => h.nonsmooth_value(x),
            SmoothTerm::LogSumExp(l) => l.nonsmooth_value(x),
            SmoothTerm::ElasticNet(e) => e.nonsmooth_value(x),
        }
    }

    /// The (θ, γ₁, γ₂, K, μ) parameter bundle of the term.
    pub fn spec(&self) -> SmoothableSpec {
        match self {
            SmoothTerm::Huber(h) => h.spec(),
            SmoothTerm::LogSumExp(l) => l.spec(),
            SmoothTerm::ElasticNet(e) => e.spec(),
        }
    }

    /// Strong convexity contributed by the term (only the elastic net's
    /// quadratic part contributes).
    pub fn strong_convexity(&self) -> f64 {
        match self {
            SmoothTerm::ElasticNet(e) => 2.0 * e.lambda2,
            _ => 0.0,
        }
    }

    /// The shape data the μ-selection rule needs for this term.
    pub fn kind(&self) -> TermKind {
        match self {
            SmoothTerm::Huber(h) => TermKind::HuberL1 { rows: h.shape.0, cols: h.shape.1 },
            SmoothTerm::LogSumExp(l) => TermKind::LogSumExp { n: l.n_terms() },
            SmoothTerm::ElasticNet(e) => TermKind::ElasticNet {
                rows: e.huber.shape.0,
                cols: e.huber.shape.1,
            },
        }
    }

    /// Replace the smoothing parameter μ, keeping everything else.
    pub fn with_mu(&self, mu: f64) -> Result<SmoothTerm> {
        Ok(match self {
            SmoothTerm::Huber(h) => {
                SmoothTerm::Huber(HuberL1::new(h.lambda, mu, h.shape)?)
            }
            SmoothTerm::LogSumExp(l) => SmoothTerm::LogSumExp(LogSumExpMax::new(
                l.constraint_matrices.clone(),
                l.offsets.clone(),
                mu,
            )?),
            SmoothTerm::ElasticNet(e) => {
                SmoothTerm::ElasticNet(ElasticNet::new(e.lambda1, e.lambda2, mu, e.huber.shape)?)
            }
        })
    }
}

/// β_R = K + θ/μ for the term's current μ.
pub fn smoothness_constant(term: &SmoothTerm) -> f64 {
    term.spec().beta_r()
}

/// Verify the two-sided sandwich R − γ₁μ ≤ R_μ ≤ R + γ₂μ at `x`, evaluating
/// the nonsmooth reference exactly. Returns (lower_ok, upper_ok).
pub fn sandwich_check(term: &SmoothTerm, x: &Mat) -> Result<(bool, bool)> {
    let spec = term.spec();
    let smooth = term.value(x)?;
    let exact = term.nonsmooth_value(x)?;
    let slack = 1e-9 * (1.0 + exact.abs() + smooth.abs());
    let lower_ok = exact - spec.gamma1 * spec.mu <= smooth + slack;
    let upper_ok = smooth <= exact + spec.gamma2 * spec.mu + slack;
    Ok((lower_ok, upper_ok))
}

/// Term kinds for the μ-selection rule (only the shape data it needs).
#[derive(Debug, Clone, Copy)]
pub enum TermKind {
    /// Huber-smoothed l1 over an m×d matrix.
    HuberL1 { rows: usize, cols: usize },
    /// Soft maximum of n affine forms.
    LogSumExp { n: usize },
    /// Elastic net over an m×d matrix (the l1 part drives the choice).
    ElasticNet { rows: usize, cols: usize },
}

/// The μ that balances smoothing bias against curvature for a target
/// accuracy ε: 7ε/(46·m·d) for the l1 instances and 7ε/(92·log n) for the
/// soft maximum. A single affine form (log n = 0) is already smooth, so the
/// rule degenerates; μ = ε is returned in that case.
pub fn choose_mu(epsilon: f64, kind: TermKind) -> Result<f64> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::Domain(format!("accuracy must be positive, got {epsilon}")));
    }
    Ok(match kind {
        TermKind::HuberL1 { rows, cols } | TermKind::ElasticNet { rows, cols } => {
            if rows == 0 || cols == 0 {
                return Err(Error::Domain("matrix shape must be nonempty".into()));
            }
            7.0 * epsilon / (46.0 * (rows * cols) as f64)
        }
        TermKind::LogSumExp { n } => {
            if n == 0 {
                return Err(Error::Domain("need at least one affine form".into()));
            }
            if n == 1 {
                epsilon
            } else {
                7.0 * epsilon / (92.0 * (n as f64).ln())
            }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{frobenius_norm, max_abs_diff};
    use crate::rng::{gaussian_matrix, substream, uniform01};
    use ndarray::Array2;

    fn random_terms(mu: f64) -> Vec<SmoothTerm> {
        let mut rng = substream(101, &[0]);
        let mats: Vec<Mat> = (0..4).map(|_| gaussian_matrix(3, 3, &mut rng)).collect();
        let offs: Vec<f64> = (0..4).map(|_| uniform01(&mut rng) - 0.5).collect();
        vec![
            SmoothTerm::Huber(HuberL1::new(1.5, mu, (3, 3)).unwrap()),
            SmoothTerm::LogSumExp(LogSumExpMax::new(mats, offs, mu).unwrap()),
            SmoothTerm::ElasticNet(ElasticNet::new(0.8, 0.6, mu, (3, 3)).unwrap()),
        ]
    }

    #[test]
    fn huber_value_matches_piecewise_formula() {
        assert_eq!(huber_value(0.0, 1.0), 0.0);
        assert_eq!(huber_value(0.5, 1.0), 0.125);
        assert_eq!(huber_value(2.0, 1.0), 1.5);
        assert_eq!(huber_value(-2.0, 1.0), 1.5);
        // Value and slope are continuous at the branch point |t| = mu.
        let mu = 0.3;
        let eps = 1e-9;
        let gap = (huber_value(mu + eps, mu) - huber_value(mu - eps, mu)).abs();
        assert!(gap <= 1e-8, "kink at branch point: {gap}");
    }

    #[test]
    fn huber_term_is_zero_at_zero() {
        let h = HuberL1::new(2.0, 0.5, (3, 4)).unwrap();
        let x = Array2::<f64>::zeros((3, 4));
        assert_eq!(h.value(&x).unwrap(), 0.0);
        assert_eq!(frobenius_norm(&h.gradient(&x).unwrap()), 0.0);
    }

    #[test]
    fn huber_gradient_is_odd_and_clipped() {
        let lambda = 1.7;
        let h = HuberL1::new(lambda, 0.25, (4, 4)).unwrap();
        let mut rng = substream(103, &[0]);
        let x = gaussian_matrix(4, 4, &mut rng);
        let g = h.gradient(&x).unwrap();
        let gneg = h.gradient(&x.mapv(|v| -v)).unwrap();
        for ((i, j), &gij) in g.indexed_iter() {
            assert!(gij.abs() <= lambda + 1e-15, "gradient magnitude exceeds the weight");
            let expected = lambda * (x[[i, j]] / 0.25).clamp(-1.0, 1.0);
            assert!((gij - expected).abs() <= 1e-14);
            assert!((gij + gneg[[i, j]]).abs() <= 1e-14, "gradient must be odd");
        }
    }

    #[test]
    fn single_affine_form_is_exactly_affine() {
        let mut rng = substream(107, &[0]);
        let a = gaussian_matrix(3, 3, &mut rng);
        let term = LogSumExpMax::new(vec![a.clone()], vec![0.7], 1e-6).unwrap();
        let x = gaussian_matrix(3, 3, &mut rng);
        let expected = frobenius_inner(&a, &x).unwrap() - 0.7;
        assert!((term.value(&x).unwrap() - expected).abs() <= 1e-12 * (1.0 + expected.abs()));
        assert!(max_abs_diff(&term.gradient(&x).unwrap(), &a) <= 1e-12);
    }

    #[test]
    fn soft_max_is_overflow_safe_and_shift_consistent() {
        let mut rng = substream(109, &[0]);
        let mats: Vec<Mat> = (0..3).map(|_| gaussian_matrix(2, 2, &mut rng)).collect();
        let offsets = vec![0.0, 1.0, -1.0];
        let mu = 1e-3; // exponents of order 10³ would overflow a naive sum
        let base = LogSumExpMax::new(mats.clone(), offsets.clone(), mu).unwrap();
        let x = gaussian_matrix(2, 2, &mut rng).mapv(|v| 3.0 * v);
        let v = base.value(&x).unwrap();
        assert!(v.is_finite(), "soft max must not overflow");
        // Shifting every offset by a constant shifts the value exactly.
        let c = 500.0;
        let shifted =
            LogSumExpMax::new(mats, offsets.iter().map(|b| b - c).collect(), mu).unwrap();
        let vs = shifted.value(&x).unwrap();
        assert!(
            ((vs - c) - v).abs() <= 1e-12 * (1.0 + v.abs() + c),
            "shift consistency: {vs} - {c} vs {v}"
        );
    }

    #[test]
    fn operator_norm_matches_stacked_map_svd() {
        let mut rng = substream(113, &[0]);
        let mats: Vec<Mat> = (0..3).map(|_| gaussian_matrix(3, 2, &mut rng)).collect();
        let term = LogSumExpMax::new(mats.clone(), vec![0.0; 3], 0.5).unwrap();
        // Stack vec(A_i) as rows and take the top singular value.
        let mut stacked = Mat::zeros((3, 6));
        for (i, a) in mats.iter().enumerate() {
            for (k, &v) in a.iter().enumerate() {
                stacked[[i, k]] = v;
            }
        }
        let top = crate::linalg::full_svd(&stacked).unwrap().singular_values[0];
        assert!(
            (term.operator_norm - top).abs() <= 1e-6 * (1.0 + top),
            "operator norm {} vs stacked-map singular value {top}",
            term.operator_norm
        );
    }

    #[test]
    fn gradients_match_central_finite_differences() {
        let mu = 0.3;
        let mut rng = substream(127, &[0]);
        for term in random_terms(mu) {
            for _ in 0..5 {
                let x = gaussian_matrix(3, 3, &mut rng);
                let g = term.gradient(&x).unwrap();
                let scale = frobenius_norm(&g).max(1e-8);
                for i in 0..3 {
                    for j in 0..3 {
                        let h = 1e-6 * (1.0 + x[[i, j]].abs());
                        let mut xp = x.clone();
                        let mut xm = x.clone();
                        xp[[i, j]] += h;
                        xm[[i, j]] -= h;
                        let fd =
                            (term.value(&xp).unwrap() - term.value(&xm).unwrap()) / (2.0 * h);
                        assert!(
                            (fd - g[[i, j]]).abs() <= 1e-5 * scale,
                            "entry ({i},{j}): finite difference {fd} vs gradient {}",
                            g[[i, j]]
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn sandwich_holds_on_random_matrices() {
        let mu = 0.2;
        let mut rng = substream(131, &[0]);
        for term in random_terms(mu) {
            for _ in 0..200 {
                let x = gaussian_matrix(3, 3, &mut rng).mapv(|v| 2.0 * v);
                let (lower, upper) = sandwich_check(&term, &x).unwrap();
                assert!(lower && upper, "sandwich violated for {term:?}");
            }
        }
    }

    #[test]
    fn sandwich_trivially_holds_at_zero() {
        for term in random_terms(0.4) {
            let x = Array2::<f64>::zeros((3, 3));
            let (lower, upper) = sandwich_check(&term, &x).unwrap();
            assert!(lower && upper);
        }
    }

    #[test]
    fn gradient_is_lipschitz_with_the_declared_constant() {
        let mu = 0.15;
        let mut rng = substream(137, &[0]);
        for term in random_terms(mu) {
            let beta = smoothness_constant(&term);
            for _ in 0..200 {
                let x = gaussian_matrix(3, 3, &mut rng);
                let y = gaussian_matrix(3, 3, &mut rng);
                let gx = term.gradient(&x).unwrap();
                let gy = term.gradient(&y).unwrap();
                let lhs = frobenius_norm(&(&gx - &gy));
                let rhs = (1.0 + 1e-6) * beta * frobenius_norm(&(&x - &y));
                assert!(lhs <= rhs, "Lipschitz violated: {lhs} > {rhs}");
            }
        }
    }

    #[test]
    fn smoothness_constants_match_closed_forms() {
        let h = SmoothTerm::Huber(HuberL1::new(2.0, 0.5, (3, 3)).unwrap());
        assert!((smoothness_constant(&h) - 4.0).abs() <= 1e-12);

        // A single 3-Frobenius-norm matrix gives operator norm 3.
        let mut a = Mat::zeros((3, 3));
        a[[0, 0]] = 3.0;
        let l = SmoothTerm::LogSumExp(LogSumExpMax::new(vec![a], vec![0.0], 1.0).unwrap());
        assert!((smoothness_constant(&l) - 9.0).abs() <= 1e-9);

        let e = SmoothTerm::ElasticNet(ElasticNet::new(0.0, 1.0, 0.5, (2, 2)).unwrap());
        assert!((smoothness_constant(&e) - 2.0).abs() <= 1e-12);
        assert_eq!(e.strong_convexity(), 2.0);
    }

    #[test]
    fn mu_selection_follows_the_accuracy_rules() {
        let got = choose_mu(0.46, TermKind::HuberL1 { rows: 7, cols: 7 }).unwrap();
        let expected = 7.0 * 0.46 / (46.0 * 49.0);
        assert!((got - expected).abs() <= 1e-15, "{got} vs {expected}");

        let lse = choose_mu(0.92, TermKind::LogSumExp { n: 8 }).unwrap();
        assert!((lse - 7.0 * 0.92 / (92.0 * (8.0f64).ln())).abs() <= 1e-15);

        // Monotone decreasing to zero with epsilon.
        let mut last = f64::INFINITY;
        for eps in [1.0, 0.1, 0.01, 0.001] {
            let mu = choose_mu(eps, TermKind::HuberL1 { rows: 3, cols: 3 }).unwrap();
            assert!(mu < last && mu > 0.0);
            last = mu;
        }

        // A single affine form is already smooth; the rule degenerates.
        assert_eq!(choose_mu(0.5, TermKind::LogSumExp { n: 1 }).unwrap(), 0.5);
        assert!(choose_mu(0.0, TermKind::LogSumExp { n: 2 }).is_err());
    }

    #[test]
    fn elastic_net_requires_positive_quadratic_weight() {
        assert!(ElasticNet::new(1.0, 0.0, 0.1, (2, 2)).is_err());
        assert!(ElasticNet::new(1.0, -1.0, 0.1, (2, 2)).is_err());
    }

    #[test]
    fn shape_mismatches_are_rejected() {
        let h = HuberL1::new(1.0, 0.1, (2, 2)).unwrap();
        let x = Array2::<f64>::zeros((3, 3));
        assert!(matches!(h.value(&x), Err(Error::DimensionMismatch { .. })));
        assert!(matches!(h.gradient(&x), Err(Error::DimensionMismatch { .. })));
    }
}
