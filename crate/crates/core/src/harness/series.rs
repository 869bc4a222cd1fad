use rayon::prelude::*;

use crate::graph::TypedGraph;
use crate::rng::stream;
use crate::scalar::Scalar;
use crate::theory::{limit_diagnostics, solve_recurrence, stationary_type_distribution};

use super::config::{ExperimentConfig, Model};
use super::experiment::run_replicate;
use super::stats::tv_distance;
use super::{thread_pool, HarnessError};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Quantity {
    /// Edge-type proportions `psi_n` per replicate.
    Psi,
    /// TV distance to the solver output per replicate (graph mode).
    Tv,
    /// `u_n(d)`, computed analytically.
    UN { degree: Vec<u32> },
    /// `n p^{(n)}_{d-e_l}(e_l)` with 0-based `l`, computed analytically.
    NpEl { degree: Vec<u32>, l: usize },
}

impl Quantity {
    pub fn name(&self) -> &'static str {
        match self {
            Quantity::Psi => "PSI",
            Quantity::Tv => "TV",
            Quantity::UN { .. } => "U_N",
            Quantity::NpEl { .. } => "NP_EL",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeriesRow<T> {
    /// `None` for the analytic quantities.
    pub replicate: Option<u64>,
    pub n: u64,
    pub values: Vec<T>,
    pub limits: Vec<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Series<T> {
    pub quantity: Quantity,
    pub rows: Vec<SeriesRow<T>>,
}

/// Snapshot indices `snapshot_every, 2 snapshot_every, ...` plus `n_steps`.
fn snapshot_steps(n_steps: u64, every: u64) -> Vec<u64> {
    let mut steps: Vec<u64> = if every > 0 { (1..=n_steps / every).map(|k| k * every).collect() } else { Vec::new() };
    if n_steps > 0 && steps.last() != Some(&n_steps) {
        steps.push(n_steps);
    }
    steps
}

/// Per-snapshot series of `quantity` next to its theoretical limit.
pub fn convergence_series<T: Scalar>(
    cfg: &ExperimentConfig<T>,
    quantity: &Quantity,
) -> Result<Series<T>, HarnessError> {
    cfg.validate()?;
    let n_types = cfg.num_types();
    let f = cfg.schedule.limit();
    let bad = |s: String| Err(HarnessError::BadQuantity(s));
    let rows = match quantity {
        Quantity::Psi => {
            let psi = stationary_type_distribution(f)?.into_vec();
            let reps: Vec<_> = thread_pool().install(|| {
                (0..cfg.replicates).into_par_iter().map(|i| run_replicate(cfg, i)).collect::<Result<Vec<_>, _>>()
            })?;
            reps.into_iter()
                .flat_map(|r| {
                    let psi = psi.clone();
                    r.psi_series.into_iter().map(move |(n, values)| SeriesRow {
                        replicate: Some(r.index),
                        n,
                        values,
                        limits: psi.clone(),
                    })
                })
                .collect()
        }
        Quantity::Tv => {
            if cfg.model != Model::Graph {
                return bad("TV series needs the graph model".into());
            }
            let theory = solve_recurrence(f, cfg.edges_per_step, cfg.d_max)?;
            let per_rep: Vec<Vec<SeriesRow<T>>> = thread_pool().install(|| {
                (0..cfg.replicates)
                    .into_par_iter()
                    .map(|i| {
                        let mut graph = TypedGraph::new(&cfg.seed_graph, cfg.edges_per_step)?;
                        let snaps = graph.run::<T, _>(
                            &cfg.schedule,
                            cfg.n_steps,
                            cfg.snapshot_every,
                            &mut stream(cfg.master_seed, i),
                        )?;
                        Ok(snaps
                            .iter()
                            .map(|s| SeriesRow {
                                replicate: Some(i),
                                n: s.n,
                                values: vec![tv_distance(&s.distribution, &theory, cfg.cutoff)],
                                limits: vec![T::zero()],
                            })
                            .collect())
                    })
                    .collect::<Result<Vec<_>, HarnessError>>()
            })?;
            per_rep.into_iter().flatten().collect()
        }
        Quantity::UN { degree } | Quantity::NpEl { degree, .. } => {
            if degree.len() != n_types {
                return bad(format!("degree has {} entries for {n_types} types", degree.len()));
            }
            let l = match quantity {
                Quantity::NpEl { l, .. } => {
                    if *l >= n_types || degree[*l] == 0 {
                        return bad(format!("type {} must be present in d", l + 1));
                    }
                    Some(*l)
                }
                _ => None,
            };
            let initial_edges = cfg.seed_graph.edges.len() as u64;
            let steps = snapshot_steps(cfg.n_steps, cfg.snapshot_every);
            let diag = limit_diagnostics(degree, cfg.edges_per_step, initial_edges, &cfg.schedule, &steps)?;
            diag.rows
                .iter()
                .map(|row| match l {
                    None => SeriesRow { replicate: None, n: row.n, values: vec![row.u_n], limits: vec![diag.limits.u] },
                    Some(l) => {
                        SeriesRow { replicate: None, n: row.n, values: vec![row.np[l]], limits: vec![diag.limits.r[l]] }
                    }
                })
                .collect()
        }
    };
    Ok(Series { quantity: quantity.clone(), rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn snapshot_step_grid() {
        assert_eq!(snapshot_steps(10, 3), vec![3, 6, 9, 10]);
        assert_eq!(snapshot_steps(9, 3), vec![3, 6, 9]);
        assert_eq!(snapshot_steps(5, 0), vec![5]);
        assert!(snapshot_steps(0, 3).is_empty());
    }
}
