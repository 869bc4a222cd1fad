//! Multi-type preferential attachment graphs with edge-type perturbation:
//! simulation, the exact limiting degree distribution, the associated
//! generalized urn, and Monte Carlo checks tying them together.
//!
//! Numerical code is generic over [`scalar::Scalar`] (`f64` or `f32`); the
//! aliases below fix the common choices.

pub mod degree;
pub mod distribution;
pub mod graph;
pub mod harness;
pub mod io;
pub mod matrix;
pub mod rng;
mod sampling;
pub mod scalar;
pub mod theory;
pub mod urn;

pub use degree::GeneralizedDegree;
pub use scalar::Scalar;

pub type StochasticMatrixF64 = matrix::StochasticMatrix<f64>;
pub type StochasticMatrixF32 = matrix::StochasticMatrix<f32>;
pub type DegreeDistributionF64 = distribution::DegreeDistribution<f64>;
pub type DegreeDistributionF32 = distribution::DegreeDistribution<f32>;
pub type PerturbationScheduleF64 = graph::PerturbationSchedule<f64>;
pub type PerturbationScheduleF32 = graph::PerturbationSchedule<f32>;
pub type TypeVectorF64 = theory::TypeVector<f64>;
pub type TypeVectorF32 = theory::TypeVector<f32>;
pub type ExperimentConfigF64 = harness::ExperimentConfig<f64>;
pub type ExperimentConfigF32 = harness::ExperimentConfig<f32>;
pub type ComparisonReportF64 = harness::ComparisonReport<f64>;
pub type ComparisonReportF32 = harness::ComparisonReport<f32>;
/// Integer-count urn sampler driven by an `f64` perturbation schedule.
pub type BernoulliSamplerF64 = urn::BernoulliColumnSampler<f64, u64>;
pub type BernoulliSamplerF32 = urn::BernoulliColumnSampler<f32, u64>;
