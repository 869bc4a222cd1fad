//! CSV rendering. Reals use 17 significant digits (`{:.16e}`) so every value
//! round-trips; decimal separator is always `.`.

use std::fmt::Write as _;

use crate::distribution::DegreeDistribution;
use crate::graph::Snapshot;
use crate::harness::{ComparisonReport, ReplicateResult, Series, StudyReport};
use crate::scalar::Scalar;
use crate::urn::UrnSnapshot;

pub fn real<T: Scalar>(x: T) -> String {
    format!("{:.16e}", x.as_f64())
}

fn header(prefix: &[&str], groups: &[(&str, usize)], suffix: &[&str]) -> String {
    let mut cols: Vec<String> = prefix.iter().map(|s| s.to_string()).collect();
    for (name, n) in groups {
        cols.extend((1..=*n).map(|l| format!("{name}_{l}")));
    }
    cols.extend(suffix.iter().map(|s| s.to_string()));
    cols.join(",") + "\n"
}

fn join_reals<T: Scalar>(xs: &[T]) -> String {
    xs.iter().map(|&x| real(x)).collect::<Vec<_>>().join(",")
}

fn join_ints<I: std::fmt::Display>(xs: impl IntoIterator<Item = I>) -> String {
    xs.into_iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

/// `d_1..d_N,mass,provenance` in canonical order.
pub fn distribution_csv<T: Scalar>(dist: &DegreeDistribution<T>) -> String {
    let mut out = header(&[], &[("d", dist.num_types())], &["mass", "provenance"]);
    for (d, m) in dist.sorted_entries() {
        writeln!(out, "{},{},{}", join_ints(d.as_slice()), real(m), dist.provenance()).unwrap();
    }
    out
}

/// `replicate,n,d_1..d_N,mass` for every snapshot of every replicate.
pub fn snapshot_distributions_csv<T: Scalar>(num_types: usize, runs: &[(u64, Vec<Snapshot<T>>)]) -> String {
    let mut out = header(&["replicate", "n"], &[("d", num_types)], &["mass"]);
    for (rep, snaps) in runs {
        for s in snaps {
            for (d, m) in s.distribution.sorted_entries() {
                writeln!(out, "{rep},{},{},{}", s.n, join_ints(d.as_slice()), real(m)).unwrap();
            }
        }
    }
    out
}

/// `replicate,n,psi_1..psi_N`.
pub fn psi_csv<T: Scalar>(num_types: usize, replicates: &[ReplicateResult<T>]) -> String {
    let mut out = header(&["replicate", "n"], &[("psi", num_types)], &[]);
    for r in replicates {
        for (n, psi) in &r.psi_series {
            writeln!(out, "{},{n},{}", r.index, join_reals(psi)).unwrap();
        }
    }
    out
}

/// `replicate,n,c_1..c_N,frac_1..frac_N`.
pub fn urn_csv<T: Scalar>(num_types: usize, runs: &[(u64, Vec<UrnSnapshot<u64, T>>)]) -> String {
    let mut out = header(&["replicate", "n"], &[("c", num_types), ("frac", num_types)], &[]);
    for (rep, snaps) in runs {
        for s in snaps {
            writeln!(out, "{rep},{},{},{}", s.n, join_ints(&s.counts), join_reals(&s.fractions)).unwrap();
        }
    }
    out
}

/// `d_1..d_N,theoretical,empirical,abs_error`.
pub fn per_degree_csv<T: Scalar>(num_types: usize, report: &ComparisonReport<T>) -> String {
    let mut out = header(&[], &[("d", num_types)], &["theoretical", "empirical", "abs_error"]);
    for e in &report.per_degree {
        writeln!(
            out,
            "{},{},{},{}",
            join_ints(e.degree.as_slice()),
            real(e.theoretical),
            real(e.empirical),
            real(e.abs_error)
        )
        .unwrap();
    }
    out
}

/// `replicate,tv,psi_error`; `tv` is empty in urn mode.
pub fn replicate_csv<T: Scalar>(report: &ComparisonReport<T>) -> String {
    let mut out = String::from("replicate,tv,psi_error\n");
    for (i, r) in report.replicates.iter().enumerate() {
        let tv = report.replicate_tv.get(i).map(|&x| real(x)).unwrap_or_default();
        writeln!(out, "{},{tv},{}", r.index, real(report.psi_errors[i])).unwrap();
    }
    out
}

/// `replicate,n,value_1..,limit_1..`; `replicate` is empty for analytic series.
pub fn series_csv<T: Scalar>(series: &Series<T>) -> String {
    let width = series.rows.first().map_or(1, |r| r.values.len());
    let mut out = header(&["replicate", "n"], &[("value", width), ("limit", width)], &[]);
    for r in &series.rows {
        let rep = r.replicate.map(|i| i.to_string()).unwrap_or_default();
        writeln!(out, "{rep},{},{},{}", r.n, join_reals(&r.values), join_reals(&r.limits)).unwrap();
    }
    out
}

/// `d_1..d_N,perturbed,unperturbed_mean,unperturbed_sd`.
pub fn study_csv<T: Scalar>(num_types: usize, report: &StudyReport<T>) -> String {
    let mut out = header(&[], &[("d", num_types)], &["perturbed", "unperturbed_mean", "unperturbed_sd"]);
    for r in &report.rows {
        writeln!(
            out,
            "{},{},{},{}",
            join_ints(r.degree.as_slice()),
            real(r.perturbed),
            real(r.unperturbed_mean),
            real(r.unperturbed_sd)
        )
        .unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::degree::GeneralizedDegree;
    use crate::distribution::Provenance;

    #[test]
    fn reals_round_trip() {
        for x in [1.0 / 3.0, 0.1, 1e-300, 2.0f64.sqrt(), 123456.789] {
            assert_eq!(real(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(real(0.5), "5.0000000000000000e-1");
    }

    #[test]
    fn distribution_rows_in_canonical_order() {
        let d = DegreeDistribution::from_masses(
            2,
            Provenance::TheoreticalPerturbed,
            [(GeneralizedDegree::from(vec![1, 1]), 0.25), (GeneralizedDegree::from(vec![0, 1]), 0.75)],
        );
        let csv = distribution_csv(&d);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "d_1,d_2,mass,provenance");
        assert!(lines[1].starts_with("0,1,7.5"));
        assert!(lines[2].starts_with("1,1,2.5"));
        assert!(lines[2].ends_with(",theoretical_perturbed"));
    }
}
