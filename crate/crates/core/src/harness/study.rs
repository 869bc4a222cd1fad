use crate::degree::{compositions, GeneralizedDegree};
use crate::rng::{stream, AUXILIARY_STREAM};
use crate::scalar::Scalar;
use crate::theory::{dirichlet_psi_sample, solve_recurrence, solve_unperturbed_recurrence, TypeVector};

use super::config::ExperimentConfig;
use super::HarnessError;

#[derive(Debug, Clone, PartialEq)]
pub struct StudyRow<T> {
    pub degree: GeneralizedDegree,
    /// Deterministic `x(d)` of the perturbed model.
    pub perturbed: T,
    pub unperturbed_mean: T,
    /// Sample standard deviation of the unperturbed `x(d)` across `psi` draws.
    pub unperturbed_sd: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StudyReport<T> {
    pub psi_samples: usize,
    pub rows: Vec<StudyRow<T>>,
}

impl<T: Scalar> StudyReport<T> {
    pub fn row(&self, d: &[u32]) -> Option<&StudyRow<T>> {
        self.rows.iter().find(|r| r.degree.as_slice() == d)
    }
}

/// Contrasts the random limit of the unperturbed model with the
/// deterministic one of the perturbed model, for every `d` with
/// `s(d) <= cfg.cutoff`.
///
/// Without `psi_list`, `psi` is drawn `n_psi_samples` times from
/// `Dirichlet(E_0 type counts)`, which is its law for `M = 1`; the draws use
/// the auxiliary stream of `cfg.master_seed`.
pub fn perturbed_vs_unperturbed_study<T: Scalar>(
    cfg: &ExperimentConfig<T>,
    n_psi_samples: usize,
    psi_list: Option<&[TypeVector<T>]>,
) -> Result<StudyReport<T>, HarnessError> {
    cfg.validate()?;
    let psis: Vec<TypeVector<T>> = match psi_list {
        Some(list) => list.to_vec(),
        None => {
            if cfg.edges_per_step != 1 {
                return Err(HarnessError::InvalidConfig(
                    "Dirichlet sampling of psi needs M = 1; supply a psi list instead".into(),
                ));
            }
            let counts = cfg.seed_graph.type_counts();
            let mut rng = stream(cfg.master_seed, AUXILIARY_STREAM);
            (0..n_psi_samples).map(|_| dirichlet_psi_sample(&counts, &mut rng)).collect::<Result<_, _>>()?
        }
    };
    if psis.is_empty() {
        return Err(HarnessError::InvalidConfig("no psi samples".into()));
    }
    let m = cfg.edges_per_step;
    let perturbed = solve_recurrence(cfg.schedule.limit(), m, cfg.cutoff)?;
    let unperturbed =
        psis.iter().map(|psi| solve_unperturbed_recurrence(psi, m, cfg.cutoff)).collect::<Result<Vec<_>, _>>()?;

    let k = T::from_count(psis.len() as u64);
    let mut rows = Vec::new();
    for w in m as u32..=cfg.cutoff as u32 {
        for d in compositions(w, cfg.num_types()) {
            let xs: Vec<T> = unperturbed.iter().map(|x| x.mass(&d)).collect();
            let mean = xs.iter().copied().sum::<T>() / k;
            let var = if xs.len() > 1 {
                xs.iter().map(|&x| (x - mean) * (x - mean)).sum::<T>() / (k - T::one())
            } else {
                T::zero()
            };
            rows.push(StudyRow {
                perturbed: perturbed.mass(&d),
                degree: GeneralizedDegree::from(d),
                unperturbed_mean: mean,
                unperturbed_sd: var.sqrt(),
            });
        }
    }
    Ok(StudyReport { psi_samples: psis.len(), rows })
}
