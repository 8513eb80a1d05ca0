//! Exact versus rank-restricted ("weak") proximal oracles.
//!
//! The weak oracle answers the same projection-style query as the exact one
//! but may only return matrices of rank at most r. Its contract: the answer
//! scores at least as well as *every* feasible point of rank ≤ r, up to the
//! caller's tolerance. This demo measures both oracles on the nuclear-norm
//! ball and the trace-bounded PSD cone, then stress-tests the weak guarantee
//! against a Monte-Carlo cloud of feasible low-rank points.
//!
//! Run with: cargo run --example prox_oracles

use svrgcg::prox::{
    check_weak_guarantee, exact_prox, psi_value, sample_feasible, weak_prox, FeasibleSet,
    ProxQuery, WeakProxConfig,
};
use svrgcg::rng::{gaussian_matrix, substream};

fn main() -> svrgcg::Result<()> {
    let mut rng = substream(20240, &[1]);

    // --- Nuclear-norm ball -------------------------------------------------
    let (rows, cols, tau, rank_budget) = (40, 30, 2.5, 3);
    let center = gaussian_matrix(rows, cols, &mut rng);
    let query = ProxQuery::new(center, 1.0, FeasibleSet::nuclear_ball(tau)?)?;

    let exact = exact_prox(&query)?;
    let weak = weak_prox(&query, &WeakProxConfig::new(rank_budget, 1e-9)?, 7)?;

    println!("nuclear-norm ball (tau = {tau}), {rows}x{cols} Gaussian center");
    println!("  {:<24} = {:.6}", "psi(exact minimizer)", psi_value(&exact, &query)?);
    println!(
        "  {:<24} = {:.6}   (factorization residual {:.2e})",
        format!("psi(weak, rank <= {rank_budget})"),
        psi_value(&weak.point, &query)?,
        weak.svd_residual
    );

    // The weak answer must beat every feasible point of rank <= r. Sample a
    // cloud of such points and confirm none scores better.
    let mut beaten = 0usize;
    let trials = 500;
    for t in 0..trials {
        let mut sample_rng = substream(20240, &[2, t]);
        let z = sample_feasible(&query.set, rows, cols, rank_budget, &mut sample_rng)?;
        if check_weak_guarantee(&weak.point, &z, &query, 1e-9)? {
            beaten += 1;
        }
    }
    println!("  weak answer beats {beaten}/{trials} random feasible rank-{rank_budget} points");

    // --- Trace-bounded PSD cone --------------------------------------------
    let d = 24;
    let g = gaussian_matrix(d, d, &mut rng);
    let sym_center = 0.5 * (&g + &g.t());
    let psd_query = ProxQuery::new(sym_center, 1.0, FeasibleSet::trace_psd_cone(1.0)?)?;

    let psd_exact = exact_prox(&psd_query)?;
    let psd_weak = weak_prox(&psd_query, &WeakProxConfig::new(2, 1e-9)?, 11)?;
    println!("\ntrace-bounded PSD cone (tau = 1), {d}x{d} symmetric center");
    println!("  {:<24} = {:.6}", "psi(exact minimizer)", psi_value(&psd_exact, &psd_query)?);
    println!(
        "  {:<24} = {:.6}   (eigenpair residual {:.2e})",
        "psi(weak, rank <= 2)",
        psi_value(&psd_weak.point, &psd_query)?,
        psd_weak.svd_residual
    );

    // Feasibility of every returned point is part of the oracle contract.
    assert!(psd_query.set.contains(&psd_weak.point, 1e-9)?);
    assert!(query.set.contains(&weak.point, 1e-9)?);
    println!("\nall oracle outputs verified feasible");
    Ok(())
}
