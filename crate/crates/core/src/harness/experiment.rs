use rayon::prelude::*;

use crate::degree::GeneralizedDegree;
use crate::distribution::{DegreeDistribution, Provenance};
use crate::graph::TypedGraph;
use crate::rng::stream;
use crate::scalar::Scalar;
use crate::theory::{solve_recurrence, stationary_type_distribution};
use crate::urn::{BernoulliColumnSampler, UrnState};

use super::config::{ExperimentConfig, Model};
use super::stats::tv_distance;
use super::{thread_pool, HarnessError};

/// Outcome of one independent simulation.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplicateResult<T> {
    pub index: u64,
    /// `(n, psi_n)` at every snapshot.
    pub psi_series: Vec<(u64, Vec<T>)>,
    pub terminal_psi: Vec<T>,
    /// Terminal empirical distribution (graph mode only).
    pub distribution: Option<DegreeDistribution<T>>,
    /// Terminal urn composition (urn mode only).
    pub composition: Option<Vec<u64>>,
    /// Empty when every conservation check held.
    pub conservation_failures: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DegreeError<T> {
    pub degree: GeneralizedDegree,
    pub theoretical: T,
    /// Empirical mass averaged over replicates.
    pub empirical: T,
    pub abs_error: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport<T> {
    pub model: Model,
    pub n_steps: u64,
    pub cutoff: u64,
    pub psi_limit: Vec<T>,
    pub replicates: Vec<ReplicateResult<T>>,
    /// TV distance per replicate (graph mode only).
    pub replicate_tv: Vec<T>,
    pub mean_tv: Option<T>,
    pub per_degree: Vec<DegreeError<T>>,
    /// `max_l |psi_n^{(l)} - psi^{(l)}|` per replicate.
    pub psi_errors: Vec<T>,
    pub psi_pass_fraction: T,
    /// Theoretical mass beyond the cutoff, `1 - sum_{s(d) <= K} x(d)`.
    pub unaccounted_mass: T,
    pub checks: Vec<Check>,
}

impl<T: Scalar> ComparisonReport<T> {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    /// Plain-text report with one PASS/FAIL line per check.
    pub fn summary(&self) -> String {
        let mut out = format!(
            "model={} steps={} replicates={} cutoff={}\n",
            self.model.as_str(),
            self.n_steps,
            self.replicates.len(),
            self.cutoff
        );
        let psi: Vec<String> = self.psi_limit.iter().map(|x| format!("{:.6}", x.as_f64())).collect();
        out += &format!("psi limit: ({})\n", psi.join(", "));
        if let Some(tv) = self.mean_tv {
            out += &format!("mean TV: {:.6}\n", tv.as_f64());
            out += &format!("unaccounted theoretical mass: {:.3e}\n", self.unaccounted_mass.as_f64());
        }
        for c in &self.checks {
            out += &format!(
                "{} {}: {:.6} (tolerance {})\n",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                c.value,
                c.tolerance
            );
        }
        out
    }
}

/// Runs `cfg.replicates` simulations on independent streams
/// `(master_seed, index)` and compares them with the theoretical limits.
pub fn run_experiment<T: Scalar>(cfg: &ExperimentConfig<T>) -> Result<ComparisonReport<T>, HarnessError> {
    cfg.validate()?;
    let f = cfg.schedule.limit();
    let psi = stationary_type_distribution(f)?.into_vec();
    let theory = match cfg.model {
        Model::Graph => Some(solve_recurrence(f, cfg.edges_per_step, cfg.d_max)?),
        Model::Urn => None,
    };

    let results: Vec<ReplicateResult<T>> = thread_pool().install(|| {
        (0..cfg.replicates).into_par_iter().map(|i| run_replicate(cfg, i)).collect::<Result<Vec<_>, _>>()
    })?;

    let mut report = ComparisonReport {
        model: cfg.model,
        n_steps: cfg.n_steps,
        cutoff: cfg.cutoff,
        psi_limit: psi.clone(),
        replicates: Vec::new(),
        replicate_tv: Vec::new(),
        mean_tv: None,
        per_degree: Vec::new(),
        psi_errors: Vec::new(),
        psi_pass_fraction: T::zero(),
        unaccounted_mass: T::zero(),
        checks: Vec::new(),
    };
    let reps = T::from_count(cfg.replicates);

    if let Some(theory) = &theory {
        let empirical: Vec<&DegreeDistribution<T>> =
            results.iter().map(|r| r.distribution.as_ref().expect("graph replicate")).collect();
        report.replicate_tv = empirical.iter().map(|e| tv_distance(e, theory, cfg.cutoff)).collect();
        let mean_tv = report.replicate_tv.iter().copied().sum::<T>() / reps;
        report.mean_tv = Some(mean_tv);
        report.unaccounted_mass = T::one() - theory.mass_up_to(cfg.cutoff);

        // Every d within the cutoff that either side puts mass on.
        let mut degrees: Vec<GeneralizedDegree> =
            theory.iter().filter(|(d, _)| d.weight() <= cfg.cutoff).map(|(d, _)| d.clone()).collect();
        for e in &empirical {
            for (d, _) in e.iter() {
                if d.weight() <= cfg.cutoff && !theory.contains(d.as_slice()) {
                    degrees.push(d.clone());
                }
            }
        }
        degrees.sort_by(|a, b| a.canonical_cmp(b));
        degrees.dedup();
        report.per_degree = degrees
            .into_iter()
            .map(|d| {
                let th = theory.mass(d.as_slice());
                let emp = empirical.iter().map(|e| e.mass(d.as_slice())).sum::<T>() / reps;
                DegreeError { degree: d, theoretical: th, empirical: emp, abs_error: (emp - th).abs() }
            })
            .collect();
        report.checks.push(Check {
            name: format!("mean TV distance (K={})", cfg.cutoff),
            value: mean_tv.as_f64(),
            tolerance: cfg.tolerances.tv.as_f64(),
            passed: mean_tv <= cfg.tolerances.tv,
        });
    }

    report.psi_errors = results
        .iter()
        .map(|r| r.terminal_psi.iter().zip(&psi).map(|(a, b)| (*a - *b).abs()).fold(T::zero(), T::max))
        .collect();
    let within = report.psi_errors.iter().filter(|&&e| e <= cfg.tolerances.psi).count() as u64;
    report.psi_pass_fraction = T::from_count(within) / reps;
    report.checks.push(Check {
        name: format!("fraction of replicates with |psi_n - psi| <= {}", cfg.tolerances.psi),
        value: report.psi_pass_fraction.as_f64(),
        tolerance: cfg.tolerances.pass_fraction.as_f64(),
        passed: report.psi_pass_fraction >= cfg.tolerances.pass_fraction,
    });
    let violations: usize = results.iter().map(|r| r.conservation_failures.len()).sum();
    report.checks.push(Check {
        name: "conservation invariant violations".into(),
        value: violations as f64,
        tolerance: 0.0,
        passed: violations == 0,
    });
    report.replicates = results;
    Ok(report)
}

/// One replicate on stream `(cfg.master_seed, index)`.
pub fn run_replicate<T: Scalar>(cfg: &ExperimentConfig<T>, index: u64) -> Result<ReplicateResult<T>, HarnessError> {
    match cfg.model {
        Model::Graph => run_graph_replicate(cfg, index),
        Model::Urn => run_urn_replicate(cfg, index),
    }
}

pub fn run_graph_replicate<T: Scalar>(
    cfg: &ExperimentConfig<T>,
    index: u64,
) -> Result<ReplicateResult<T>, HarnessError> {
    let mut rng = stream(cfg.master_seed, index);
    let mut graph = TypedGraph::new(&cfg.seed_graph, cfg.edges_per_step)?;
    let snapshots = graph.run::<T, _>(&cfg.schedule, cfg.n_steps, cfg.snapshot_every, &mut rng)?;
    let mut failures = Vec::new();
    if let Err(e) = graph.check_invariants() {
        failures.push(format!("replicate {index}: {e}"));
    }
    let expected_edges = graph.initial_edges() + cfg.edges_per_step as u64 * cfg.n_steps;
    if graph.type_counts().iter().sum::<u64>() != expected_edges {
        failures.push(format!("replicate {index}: edge count differs from |E_0| + M n"));
    }
    let census_total: u64 = graph.census().values().sum();
    if census_total != graph.num_vertices() as u64 {
        failures.push(format!("replicate {index}: census total {census_total} != |V_n|"));
    }
    let terminal = snapshots.last().expect("run records the final state");
    Ok(ReplicateResult {
        index,
        psi_series: snapshots.iter().map(|s| (s.n, s.psi.clone())).collect(),
        terminal_psi: terminal.psi.clone(),
        distribution: Some(terminal.distribution.clone()),
        composition: None,
        conservation_failures: failures,
    })
}

pub fn run_urn_replicate<T: Scalar>(cfg: &ExperimentConfig<T>, index: u64) -> Result<ReplicateResult<T>, HarnessError> {
    let mut rng = stream(cfg.master_seed, index);
    let sampler: BernoulliColumnSampler<T> = BernoulliColumnSampler::from_schedule(cfg.schedule.clone());
    let mut urn = UrnState::new(cfg.initial_composition.clone(), cfg.edges_per_step, &sampler)?;
    let snapshots = urn.run(&sampler, cfg.n_steps, cfg.snapshot_every, &mut rng)?;
    let mut failures = Vec::new();
    if let Err(e) = urn.check_conservation() {
        failures.push(format!("replicate {index}: {e}"));
    }
    let terminal = snapshots.last().expect("run records the final state");
    Ok(ReplicateResult {
        index,
        psi_series: snapshots.iter().map(|s| (s.n, s.fractions.clone())).collect(),
        terminal_psi: terminal.fractions.clone(),
        distribution: None,
        composition: Some(terminal.counts.clone()),
        conservation_failures: failures,
    })
}

/// Empirical distribution of the seed graph alone (the `n = 0` state).
pub fn seed_census<T: Scalar>(cfg: &ExperimentConfig<T>) -> Result<DegreeDistribution<T>, HarnessError> {
    let graph = TypedGraph::new(&cfg.seed_graph, cfg.edges_per_step)?;
    let d = graph.empirical_distribution::<T>();
    debug_assert_eq!(d.provenance(), Provenance::Empirical);
    Ok(d)
}
