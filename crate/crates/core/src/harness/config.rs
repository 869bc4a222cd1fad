use crate::graph::{PerturbationSchedule, SeedGraphSpec};
use crate::scalar::Scalar;

use super::HarnessError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Model {
    Graph,
    Urn,
}

impl Model {
    pub fn as_str(self) -> &'static str {
        match self {
            Model::Graph => "graph",
            Model::Urn => "urn",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances<T> {
    /// Bound on the mean TV distance over replicates.
    pub tv: T,
    /// Sup-norm bound on `|psi_n - psi|` for a single replicate.
    pub psi: T,
    /// Fraction of replicates that must meet the `psi` bound.
    pub pass_fraction: T,
}

impl<T: Scalar> Default for Tolerances<T> {
    fn default() -> Self {
        Tolerances { tv: T::lit(0.02), psi: T::lit(0.02), pass_fraction: T::lit(0.95) }
    }
}

pub const DEFAULT_STEPS: u64 = 10_000;
pub const DEFAULT_SNAPSHOT_EVERY: u64 = 1_000;
pub const DEFAULT_REPLICATES: u64 = 1;
pub const DEFAULT_MASTER_SEED: u64 = 0;

/// Everything needed to rerun an experiment bit for bit.
#[derive(Debug, Clone)]
pub struct ExperimentConfig<T> {
    pub model: Model,
    /// `M`, edges (or draws) per step.
    pub edges_per_step: usize,
    pub schedule: PerturbationSchedule<T>,
    pub seed_graph: SeedGraphSpec,
    /// Urn start `C_0`; defaults to the seed graph's type counts.
    pub initial_composition: Vec<u64>,
    pub n_steps: u64,
    /// Zero records only the initial and final states.
    pub snapshot_every: u64,
    pub replicates: u64,
    pub master_seed: u64,
    /// Largest weight the solver tabulates.
    pub d_max: u64,
    /// Comparison cutoff `K`: only `d` with `s(d) <= K` enter the TV distance.
    pub cutoff: u64,
    pub tolerances: Tolerances<T>,
}

impl<T: Scalar> ExperimentConfig<T> {
    /// Defaults: parallel-pair seed graph, `C_0` its type counts,
    /// `K = D_max = M + 10`, and the constants above.
    pub fn new(model: Model, edges_per_step: usize, schedule: PerturbationSchedule<T>) -> Self {
        let seed_graph = SeedGraphSpec::parallel_pair(schedule.num_types());
        let initial_composition = seed_graph.type_counts();
        let k = edges_per_step as u64 + 10;
        ExperimentConfig {
            model,
            edges_per_step,
            schedule,
            seed_graph,
            initial_composition,
            n_steps: DEFAULT_STEPS,
            snapshot_every: DEFAULT_SNAPSHOT_EVERY,
            replicates: DEFAULT_REPLICATES,
            master_seed: DEFAULT_MASTER_SEED,
            d_max: k,
            cutoff: k,
            tolerances: Tolerances::default(),
        }
    }

    pub fn num_types(&self) -> usize {
        self.schedule.num_types()
    }

    /// Checks the cross-field invariants; module-level validity is
    /// checked again when the simulation objects are built.
    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |s: String| Err(HarnessError::InvalidConfig(s));
        let n = self.num_types();
        if self.edges_per_step == 0 {
            return bad("M must be positive".into());
        }
        if self.replicates == 0 {
            return bad("replicates must be at least 1".into());
        }
        if self.cutoff > self.d_max {
            return bad(format!("cutoff {} exceeds d_max {}", self.cutoff, self.d_max));
        }
        if self.seed_graph.num_types != n {
            return bad(format!("seed graph has {} types, F has {n}", self.seed_graph.num_types));
        }
        if self.initial_composition.len() != n {
            return bad(format!("C0 has {} entries, F has {n}", self.initial_composition.len()));
        }
        if self.model == Model::Urn && self.initial_composition.iter().all(|&c| c == 0) {
            return bad("C0 is empty".into());
        }
        let t = &self.tolerances;
        let unit = |x: T| x >= T::zero() && x <= T::one();
        if !(unit(t.tv) && unit(t.psi) && unit(t.pass_fraction)) {
            return bad("tolerances must lie in [0, 1]".into());
        }
        Ok(())
    }
}
