//! Monte Carlo experiments checked against the theoretical limits.

mod config;
mod experiment;
mod series;
pub mod stats;
mod study;

use thiserror::Error;

use crate::graph::GraphError;
use crate::matrix::MatrixError;
use crate::theory::TheoryError;
use crate::urn::UrnError;

pub use config::{
    ExperimentConfig, Model, Tolerances, DEFAULT_MASTER_SEED, DEFAULT_REPLICATES, DEFAULT_SNAPSHOT_EVERY, DEFAULT_STEPS,
};
pub use experiment::{
    run_experiment, run_graph_replicate, run_replicate, run_urn_replicate, seed_census, Check, ComparisonReport,
    DegreeError, ReplicateResult,
};
pub use series::{convergence_series, Quantity, Series, SeriesRow};
pub use stats::tv_distance;
pub use study::{perturbed_vs_unperturbed_study, StudyReport, StudyRow};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HarnessError {
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error("bad quantity: {0}")]
    BadQuantity(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Urn(#[from] UrnError),
    #[error(transparent)]
    Theory(#[from] TheoryError),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

/// Environment variable capping harness parallelism; `0` or unset means
/// one thread per core.
pub const THREADS_ENV: &str = "MTPA_THREADS";

pub(crate) fn thread_pool() -> rayon::ThreadPool {
    let threads = std::env::var(THREADS_ENV).ok().and_then(|v| v.trim().parse::<usize>().ok()).unwrap_or(0);
    rayon::ThreadPoolBuilder::new().num_threads(threads).build().expect("thread pool")
}
