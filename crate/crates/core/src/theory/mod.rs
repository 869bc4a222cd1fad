//! Deterministic numerics: the stationary type vector, the recurrences for
//! the asymptotic degree distribution, and exact one-step attachment
//! probabilities with their large-`n` limits.

mod attachment;
mod dirichlet;
mod recurrence;
mod stationary;

use thiserror::Error;

use crate::matrix::MatrixError;

pub use attachment::{
    alpha_set, attachment_probability, attachment_term, beta_set, binomial_bound_terms, exact_no_edge_probability,
    lemma_binomial_bound_check, limit_diagnostics, limit_values, new_vertex_probability, DiagnosticRow,
    LimitDiagnostics, LimitValues,
};
pub use dirichlet::dirichlet_psi_sample;
pub use recurrence::{
    lattice_size, multinomial_coefficient, solve_recurrence, solve_recurrence_with, solve_unperturbed_recurrence,
    solve_unperturbed_recurrence_with, SolverOptions, DEFAULT_MAX_CELLS,
};
pub use stationary::{stationary_type_distribution, stationary_with, StationaryMethod, TypeVector};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TheoryError {
    #[error("not a stochastic matrix: {0}")]
    NotStochastic(#[from] MatrixError),
    #[error("perturbation matrix is not irreducible")]
    NotIrreducible,
    #[error("power iteration did not converge in {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("lattice of {cells} cells exceeds the cap of {cap}")]
    CapacityExceeded { cells: u128, cap: u128 },
    #[error("edges per step must be positive and D_max >= M (M = {m}, D_max = {d_max})")]
    BadDimensions { m: usize, d_max: u64 },
    #[error("type vector is not a probability vector")]
    BadPsi,
    #[error("Dirichlet parameters must all be at least 1")]
    BadCounts,
    #[error("invalid arguments: {0}")]
    BadArgs(String),
    #[error("index matrix does not belong to beta(i): {0}")]
    BadIndexMatrix(String),
}
