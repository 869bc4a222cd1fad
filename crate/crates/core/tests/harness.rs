use mtpa::degree::GeneralizedDegree;
use mtpa::distribution::{DegreeDistribution, Provenance};
use mtpa::graph::PerturbationSchedule;
use mtpa::harness::{
    convergence_series, perturbed_vs_unperturbed_study, run_experiment, run_replicate, seed_census, tv_distance,
    ExperimentConfig, HarnessError, Model, Quantity,
};
use mtpa::matrix::StochasticMatrix;
use mtpa::theory::{solve_recurrence, TypeVector};
use proptest::prelude::*;

fn graph_cfg(f: StochasticMatrix<f64>, m: usize) -> ExperimentConfig<f64> {
    ExperimentConfig::new(Model::Graph, m, PerturbationSchedule::constant(f))
}

fn symmetric(diag: f64) -> StochasticMatrix<f64> {
    StochasticMatrix::symmetric(2, diag).unwrap()
}

#[test]
fn report_does_not_depend_on_execution_order() {
    let mut cfg = graph_cfg(symmetric(0.9), 2);
    cfg.n_steps = 3_000;
    cfg.replicates = 6;
    cfg.master_seed = 21;
    let report = run_experiment(&cfg).unwrap();
    assert_eq!(report, run_experiment(&cfg).unwrap());
    for i in (0..6).rev() {
        assert_eq!(run_replicate(&cfg, i).unwrap(), report.replicates[i as usize]);
    }
    let mean = report.replicate_tv.iter().sum::<f64>() / 6.0;
    assert_eq!(report.mean_tv, Some(mean));
    assert!(report.replicate_tv.iter().all(|&t| (0.0..=1.0).contains(&t)));
}

#[test]
fn zero_steps_compares_the_seed_graph() {
    let mut cfg = graph_cfg(symmetric(0.9), 1);
    cfg.n_steps = 0;
    let report = run_experiment(&cfg).unwrap();
    let theory = solve_recurrence(cfg.schedule.limit(), 1, cfg.d_max).unwrap();
    let seed = seed_census(&cfg).unwrap();
    assert_eq!(report.mean_tv, Some(tv_distance(&seed, &theory, cfg.cutoff)));
    assert_eq!(report.replicates.len(), 1);
    assert_eq!(report.replicates[0].psi_series, vec![(0, vec![0.5, 0.5])]);
    assert!(report.summary().contains("mean TV"));
    assert!(report.unaccounted_mass > 0.0 && report.unaccounted_mass < 0.05);
}

#[test]
fn config_validation() {
    let mut cfg = graph_cfg(symmetric(0.9), 1);
    cfg.replicates = 0;
    assert!(matches!(run_experiment(&cfg), Err(HarnessError::InvalidConfig(_))));
    let mut cfg = graph_cfg(symmetric(0.9), 1);
    cfg.cutoff = cfg.d_max + 1;
    assert!(matches!(run_experiment(&cfg), Err(HarnessError::InvalidConfig(_))));
}

#[test]
fn urn_mode_reports_psi_only() {
    let mut cfg = graph_cfg(StochasticMatrix::from_rows(&[vec![0.8, 0.2], vec![0.4, 0.6]]).unwrap(), 3);
    cfg.model = Model::Urn;
    cfg.initial_composition = vec![1, 3];
    cfg.n_steps = 5_000;
    cfg.replicates = 4;
    let report = run_experiment(&cfg).unwrap();
    assert!(report.mean_tv.is_none());
    assert!(report.per_degree.is_empty());
    assert_eq!(report.replicates[0].composition.as_ref().unwrap().iter().sum::<u64>(), 4 + 3 * 5_000);
    assert!(report.checks.iter().any(|c| c.name.contains("conservation") && c.passed));
}

#[test]
fn u_n_series_converges() {
    let mut cfg = graph_cfg(symmetric(0.9), 2);
    cfg.n_steps = 10_000;
    cfg.snapshot_every = 500;
    let s = convergence_series(&cfg, &Quantity::UN { degree: vec![2, 1] }).unwrap();
    let gaps: Vec<f64> = s.rows.iter().map(|r| (r.values[0] - r.limits[0]).abs()).collect();
    assert!(s.rows.iter().all(|r| r.limits[0] == 1.5 && r.replicate.is_none()));
    assert!(gaps.windows(2).all(|w| w[1] < w[0]));
    assert_eq!(s.rows.last().unwrap().n, 10_000);
    assert!(*gaps.last().unwrap() < 1e-3);
}

#[test]
fn np_el_series_limit() {
    let mut cfg = graph_cfg(symmetric(0.9), 1);
    cfg.n_steps = 10_000;
    let s = convergence_series(&cfg, &Quantity::NpEl { degree: vec![2, 1], l: 0 }).unwrap();
    let last = s.rows.last().unwrap();
    assert!((last.limits[0] - 0.5).abs() < 1e-15);
    assert!((last.values[0] - 0.5).abs() < 1e-3);
}

#[test]
fn bad_quantities() {
    let mut cfg = graph_cfg(symmetric(0.9), 1);
    assert!(matches!(
        convergence_series(&cfg, &Quantity::NpEl { degree: vec![0, 2], l: 0 }),
        Err(HarnessError::BadQuantity(_))
    ));
    assert!(matches!(convergence_series(&cfg, &Quantity::UN { degree: vec![1] }), Err(HarnessError::BadQuantity(_))));
    cfg.model = Model::Urn;
    assert!(matches!(convergence_series(&cfg, &Quantity::Tv), Err(HarnessError::BadQuantity(_))));
}

#[test]
fn tv_series_per_replicate() {
    let mut cfg = graph_cfg(symmetric(0.8), 2);
    cfg.n_steps = 2_000;
    cfg.snapshot_every = 1_000;
    cfg.replicates = 2;
    let s = convergence_series(&cfg, &Quantity::Tv).unwrap();
    assert_eq!(s.rows.len(), 2 * 3);
    assert!(s.rows.iter().all(|r| (0.0..=1.0).contains(&r.values[0])));
}

#[test]
fn psi_series_symmetric_f() {
    // Symmetric F with second eigenvalue 0.2, so psi_n settles quickly.
    let mut cfg = graph_cfg(symmetric(0.6), 1);
    cfg.n_steps = 100_000;
    cfg.snapshot_every = 0;
    cfg.replicates = 50;
    let s = convergence_series(&cfg, &Quantity::Psi).unwrap();
    let finals: Vec<f64> = s.rows.iter().filter(|r| r.n == 100_000).map(|r| (r.values[0] - 0.5).abs()).collect();
    assert_eq!(finals.len(), 50);
    let within = finals.iter().filter(|&&e| e < 0.02).count();
    assert!(within as f64 >= 0.95 * 50.0, "{within}/50");
}

#[test]
fn study_contrast() {
    let mut cfg = graph_cfg(symmetric(0.7), 1);
    cfg.cutoff = 6;
    cfg.d_max = 6;
    let a = perturbed_vs_unperturbed_study(&cfg, 1_000, None).unwrap();
    let row = a.row(&[1, 0]).unwrap();
    // x((1,0)) = (2/3) psi_1 with psi_1 uniform: sd = (2/3) / sqrt(12).
    assert!((row.unperturbed_sd - 2.0 / 3.0 / 12f64.sqrt()).abs() < 0.02, "{}", row.unperturbed_sd);
    assert!((row.perturbed - 1.0 / 3.0).abs() < 1e-12);
    cfg.master_seed = 99;
    let b = perturbed_vs_unperturbed_study(&cfg, 1_000, None).unwrap();
    let pa: Vec<u64> = a.rows.iter().map(|r| r.perturbed.to_bits()).collect();
    let pb: Vec<u64> = b.rows.iter().map(|r| r.perturbed.to_bits()).collect();
    assert_eq!(pa, pb);
    assert_ne!(a.row(&[1, 0]).unwrap().unperturbed_mean, b.row(&[1, 0]).unwrap().unperturbed_mean);
}

#[test]
fn study_needs_psi_list_beyond_single_edge() {
    let cfg = graph_cfg(symmetric(0.7), 2);
    assert!(matches!(perturbed_vs_unperturbed_study(&cfg, 10, None), Err(HarnessError::InvalidConfig(_))));
    let list = [TypeVector::new(vec![0.5, 0.5]).unwrap(), TypeVector::new(vec![0.9, 0.1]).unwrap()];
    let r = perturbed_vs_unperturbed_study(&cfg, 0, Some(&list)).unwrap();
    assert_eq!(r.psi_samples, 2);
    assert!(r.row(&[2, 0]).unwrap().unperturbed_sd > 0.0);
}

fn arb_dist() -> impl Strategy<Value = DegreeDistribution<f64>> {
    proptest::collection::vec((0u32..4, 0u32..4, 0.0f64..1.0), 1..8).prop_map(|cells| {
        let total: f64 = cells.iter().map(|c| c.2).sum::<f64>().max(1e-9);
        let mut d = DegreeDistribution::new(2, Provenance::Empirical, None);
        for (a, b, m) in cells {
            d.insert(GeneralizedDegree::from(vec![a, b]), m / total);
        }
        d
    })
}

proptest! {
    #[test]
    fn tv_is_a_bounded_symmetric_distance(p in arb_dist(), q in arb_dist(), k in 0u64..10) {
        let a = tv_distance(&p, &q, k);
        let b = tv_distance(&q, &p, k);
        prop_assert!((a - b).abs() < 1e-15);
        prop_assert!((0.0..=1.0).contains(&a));
        prop_assert_eq!(tv_distance(&p, &p, k), 0.0);
    }
}
