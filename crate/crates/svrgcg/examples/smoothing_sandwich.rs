//! Smoothed surrogates for nonsmooth regularizers, with certified bounds.
//!
//! Each smoothing R_mu comes with a two-sided sandwich
//!     R − γ₁·μ  ≤  R_μ  ≤  R + γ₂·μ
//! and a curvature constant β_R = K + θ/μ, so a solver that needs gradients
//! can trade accuracy (drive μ down) against smoothness (β_R grows like 1/μ).
//! This demo evaluates the sandwich numerically for all three smoothings and
//! shows how the accuracy-driven μ rule picks the smoothing level.
//!
//! Run with: cargo run --example smoothing_sandwich

use svrgcg::rng::{gaussian_matrix, substream};
use svrgcg::smoothing::{
    choose_mu, sandwich_check, smoothness_constant, ElasticNet, HuberL1, LogSumExpMax, SmoothTerm,
    TermKind,
};

fn main() -> svrgcg::Result<()> {
    let mut rng = substream(31, &[0]);
    let shape = (12, 9);
    let x = gaussian_matrix(shape.0, shape.1, &mut rng);

    // --- Huber-smoothed entrywise l1 ----------------------------------------
    println!("Huber-smoothed l1 (lambda = 0.8) on a {}x{} matrix", shape.0, shape.1);
    println!("{:>10} {:>14} {:>14} {:>12} {:>9}", "mu", "R(x)", "R_mu(x)", "beta_R", "sandwich");
    for mu in [1.0, 0.1, 0.01, 0.001] {
        let term = SmoothTerm::Huber(HuberL1::new(0.8, mu, shape)?);
        let (lo, hi) = sandwich_check(&term, &x)?;
        println!(
            "{mu:>10} {:>14.6} {:>14.6} {:>12.1} {:>9}",
            term.nonsmooth_value(&x)?,
            term.value(&x)?,
            smoothness_constant(&term),
            if lo && hi { "ok" } else { "VIOLATED" },
        );
    }

    // Accuracy-driven choice: the μ that keeps the smoothing error compatible
    // with a target suboptimality ε.
    for eps in [1e-1, 1e-2, 1e-3] {
        let mu = choose_mu(eps, TermKind::HuberL1 { rows: shape.0, cols: shape.1 })?;
        println!("  target accuracy {eps:>6}: chosen mu = {mu:.3e}");
    }

    // --- Soft maximum of affine forms ---------------------------------------
    let n_forms = 6;
    let mut mats = Vec::with_capacity(n_forms);
    let mut offsets = Vec::with_capacity(n_forms);
    for k in 0..n_forms {
        let mut frame_rng = substream(31, &[1, k as u64]);
        mats.push(gaussian_matrix(shape.0, shape.1, &mut frame_rng));
        offsets.push(0.1 * k as f64);
    }
    println!("\nsoft maximum of {n_forms} affine forms");
    println!("{:>10} {:>14} {:>14} {:>12} {:>9}", "mu", "max(x)", "softmax(x)", "beta_R", "sandwich");
    for mu in [1.0, 0.1, 0.01] {
        let term = SmoothTerm::LogSumExp(LogSumExpMax::new(mats.clone(), offsets.clone(), mu)?);
        let (lo, hi) = sandwich_check(&term, &x)?;
        println!(
            "{mu:>10} {:>14.6} {:>14.6} {:>12.1} {:>9}",
            term.nonsmooth_value(&x)?,
            term.value(&x)?,
            smoothness_constant(&term),
            if lo && hi { "ok" } else { "VIOLATED" },
        );
    }
    let mu = choose_mu(1e-2, TermKind::LogSumExp { n: n_forms })?;
    println!("  target accuracy   0.01: chosen mu = {mu:.3e}");

    // --- Elastic net ---------------------------------------------------------
    // The quadratic part is untouched by smoothing and contributes strong
    // convexity 2·lambda2, which the solver folds into its schedule.
    let term = SmoothTerm::ElasticNet(ElasticNet::new(0.8, 0.5, 0.01, shape)?);
    let (lo, hi) = sandwich_check(&term, &x)?;
    println!("\nelastic net (lambda1 = 0.8, lambda2 = 0.5, mu = 0.01)");
    println!("  R(x) = {:.6}, R_mu(x) = {:.6}", term.nonsmooth_value(&x)?, term.value(&x)?);
    println!("  strong convexity contributed: {}", term.strong_convexity());
    println!("  sandwich: {}", if lo && hi { "ok" } else { "VIOLATED" });
    Ok(())
}
