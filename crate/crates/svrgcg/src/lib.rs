//! Variance-reduced conditional-gradient solvers for composite objectives
//! over low-rank matrix feasible sets.
//!
//! The crate provides, bottom-up:
//!
//! - [`linalg`]: deterministic dense factorizations (Jacobi SVD and
//!   eigendecomposition, randomized subspace iteration for truncated SVD)
//!   and the simplex projection that powers the proximal oracles;
//! - [`prox`]: exact and rank-restricted ("weak") proximal oracles over the
//!   nuclear-norm ball and the trace-bounded PSD cone;
//! - [`smoothing`]: Nesterov-style smoothings of nonsmooth regularizers
//!   (Huber-smoothed entrywise l1, soft-max of affine forms, elastic net)
//!   with certified two-sided approximation bounds;
//! - [`objective`]: stochastic and finite-sum first-order oracles with
//!   snapshot-based variance-reduced gradient estimators;
//! - [`solver`]: the variance-reduced conditional-gradient method, its
//!   hyperparameter schedule, convergence predictions, and a smoothing
//!   front-end for nonsmooth problems;
//! - [`baselines`]: linear-minimization-oracle baselines (stochastic
//!   conditional gradient and its sliding variant) used for comparisons;
//! - [`bench`]: experiment generators, metrics, and CSV reporting behind the
//!   `bench` binary.

pub mod baselines;
pub mod bench;
pub mod error;
pub mod linalg;
pub mod objective;
pub mod prox;
pub mod rng;
pub mod smoothing;
pub mod solver;

/// Dense column-major-agnostic matrix of `f64`, the working type throughout.
pub type Mat = ndarray::Array2<f64>;

pub use error::{Error, Result};
