use statrs::function::gamma::ln_gamma;

use super::stationary::{stationary_type_distribution, stationary_with, StationaryMethod, TypeVector};
use super::TheoryError;
use crate::degree::{compositions, GeneralizedDegree};
use crate::distribution::{DegreeDistribution, Provenance};
use crate::matrix::StochasticMatrix;
use crate::scalar::Scalar;

pub const DEFAULT_MAX_CELLS: u128 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Refuse lattices with more cells than this instead of truncating.
    pub max_cells: u128,
    /// `None` picks the default for the matrix size.
    pub stationary: Option<StationaryMethod>,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions { max_cells: DEFAULT_MAX_CELLS, stationary: None }
    }
}

/// Number of `d` in `N^num_types` with `s(d) <= max_weight`, i.e.
/// `C(max_weight + N, N)`; saturates instead of overflowing.
pub fn lattice_size(num_types: usize, max_weight: u64) -> u128 {
    let mut acc: u128 = 1;
    for i in 1..=num_types as u128 {
        // acc = C(max_weight + i, i), built incrementally; exact at each step.
        acc = match acc.checked_mul(max_weight as u128 + i) {
            Some(v) => v / i,
            None => return u128::MAX,
        };
    }
    acc
}

/// `s(d)! / prod_l d_l!`: exact integer arithmetic up to `s(d) = 20`,
/// log-gamma above.
pub fn multinomial_coefficient<T: Scalar>(d: &[u32]) -> T {
    let s: u64 = d.iter().map(|&c| c as u64).sum();
    if s <= 20 {
        let fact = |k: u64| (1..=k).product::<u64>();
        let denom: u64 = d.iter().map(|&c| fact(c as u64)).product();
        T::from_count(fact(s) / denom)
    } else {
        T::lit(ln_multinomial(d).exp())
    }
}

fn ln_multinomial(d: &[u32]) -> f64 {
    let s: f64 = d.iter().map(|&c| c as f64).sum();
    ln_gamma(s + 1.0) - d.iter().map(|&c| ln_gamma(c as f64 + 1.0)).sum::<f64>()
}

/// `multinomial(d) * prod_l p_l^{d_l}`, in log space once `s(d) > 20`.
fn multinomial_pmf<T: Scalar>(d: &[u32], p: &[T]) -> T {
    let s: u64 = d.iter().map(|&c| c as u64).sum();
    if s <= 20 {
        let prod = d.iter().zip(p).fold(T::one(), |acc, (&c, &q)| acc * q.powi(c as i32));
        multinomial_coefficient::<T>(d) * prod
    } else {
        let mut log = ln_multinomial(d);
        for (&c, &q) in d.iter().zip(p) {
            if c > 0 {
                log += c as f64 * q.as_f64().ln();
            }
        }
        T::lit(log.exp())
    }
}

/// Fills `x(d)` for `M <= s(d) <= d_max`, one weight class at a time in
/// lexicographic order. `cell(d, s, lookup)` may read any `x(d')` of
/// weight `s - 1` through `lookup`; lower weights are zero.
fn solve_lattice<T, K>(
    num_types: usize,
    m: usize,
    d_max: u64,
    opts: &SolverOptions,
    provenance: Provenance,
    cell: K,
) -> Result<DegreeDistribution<T>, TheoryError>
where
    T: Scalar,
    K: Fn(&[u32], u64, &dyn Fn(&[u32]) -> T) -> T,
{
    if m == 0 || d_max < m as u64 {
        return Err(TheoryError::BadDimensions { m, d_max });
    }
    let cells = lattice_size(num_types, d_max).saturating_sub(lattice_size(num_types, m as u64 - 1));
    if cells > opts.max_cells {
        return Err(TheoryError::CapacityExceeded { cells, cap: opts.max_cells });
    }
    let mut dist = DegreeDistribution::new(num_types, provenance, Some(d_max));
    for w in m as u64..=d_max {
        let values: Vec<(Vec<u32>, T)> = compositions(w as u32, num_types)
            .map(|d| {
                let x = cell(&d, w, &|key: &[u32]| dist.mass(key));
                (d, x)
            })
            .collect();
        for (d, x) in values {
            dist.insert(GeneralizedDegree::from(d), x);
        }
    }
    Ok(dist)
}

/// Asymptotic degree distribution of the perturbed model:
///
/// * `s(d) = M`: `x(d) = 2 M!/(M+2) prod_l (sum_k psi_k eps_{k,l})^{d_l} / d_l!`
/// * `s(d) > M`: `x(d) = sum_l (d - e_l)^T F_{.,l} / (s(d) + 2) x(d - e_l)`
///
/// with `psi` the stationary vector of `F` and `x(d) = 0` for `s(d) < M`.
pub fn solve_recurrence<T: Scalar>(
    f: &StochasticMatrix<T>,
    m: usize,
    d_max: u64,
) -> Result<DegreeDistribution<T>, TheoryError> {
    solve_recurrence_with(f, m, d_max, &SolverOptions::default())
}

pub fn solve_recurrence_with<T: Scalar>(
    f: &StochasticMatrix<T>,
    m: usize,
    d_max: u64,
    opts: &SolverOptions,
) -> Result<DegreeDistribution<T>, TheoryError> {
    let n = f.dim();
    let psi = match opts.stationary {
        Some(method) => stationary_with(f, method)?,
        None => stationary_type_distribution(f)?,
    };
    // Type law of a newborn edge after perturbation: (psi F)_l.
    let newborn = f.matrix().left_mul(psi.as_slice());
    let columns: Vec<Vec<T>> = (0..n).map(|l| f.column(l)).collect();
    let two = T::lit(2.0);
    let base_scale = two / T::from_count(m as u64 + 2);

    solve_lattice(n, m, d_max, opts, Provenance::TheoreticalPerturbed, |d, s, lookup| {
        if s == m as u64 {
            return base_scale * multinomial_pmf(d, &newborn);
        }
        let denom = T::from_count(s + 2);
        let mut prev = d.to_vec();
        let mut total = T::zero();
        for l in 0..n {
            if d[l] == 0 {
                continue;
            }
            prev[l] -= 1;
            let rate: T = prev.iter().zip(&columns[l]).map(|(&c, &eps)| T::from_count(c as u64) * eps).sum();
            total = total + rate / denom * lookup(&prev);
            prev[l] += 1;
        }
        total
    })
}

/// Conditional (given `psi`) asymptotic degree distribution of the model
/// without perturbation:
/// `x(d) = sum_l (d_l - 1)/(s(d)+2) x(d - e_l) + 1{s(d) = M} 2/(s(d)+2) multinomial(d) prod_l psi_l^{d_l}`.
pub fn solve_unperturbed_recurrence<T: Scalar>(
    psi: &TypeVector<T>,
    m: usize,
    d_max: u64,
) -> Result<DegreeDistribution<T>, TheoryError> {
    solve_unperturbed_recurrence_with(psi, m, d_max, &SolverOptions::default())
}

pub fn solve_unperturbed_recurrence_with<T: Scalar>(
    psi: &TypeVector<T>,
    m: usize,
    d_max: u64,
    opts: &SolverOptions,
) -> Result<DegreeDistribution<T>, TheoryError> {
    let n = psi.len();
    let p = psi.as_slice();
    let two = T::lit(2.0);
    solve_lattice(n, m, d_max, opts, Provenance::TheoreticalUnperturbed, |d, s, lookup| {
        let denom = T::from_count(s + 2);
        let mut prev = d.to_vec();
        let mut total = T::zero();
        for l in 0..n {
            if d[l] == 0 {
                continue;
            }
            prev[l] -= 1;
            total = total + T::from_count(d[l] as u64 - 1) / denom * lookup(&prev);
            prev[l] += 1;
        }
        if s == m as u64 {
            total = total + two / denom * multinomial_pmf(d, p);
        }
        total
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lattice_counts() {
        assert_eq!(lattice_size(1, 10), 11);
        assert_eq!(lattice_size(2, 3), 10);
        assert_eq!(lattice_size(3, 200), 1_373_701);
        assert_eq!(lattice_size(0, 5), 1);
        assert_eq!(lattice_size(64, u64::MAX / 2), u128::MAX);
    }

    #[test]
    fn multinomials() {
        assert_eq!(multinomial_coefficient::<f64>(&[2, 1]), 3.0);
        assert_eq!(multinomial_coefficient::<f64>(&[10, 10]), 184_756.0);
        // C(30, 15) = 155117520, through the log-gamma branch.
        let c: f64 = multinomial_coefficient(&[15, 15]);
        assert!((c - 155_117_520.0).abs() / 155_117_520.0 < 1e-12);
    }

    #[test]
    fn log_space_pmf_matches_direct() {
        // Binomial(22, 0.3) at 7 successes, computed directly.
        let direct = 170_544.0 * 0.3f64.powi(7) * 0.7f64.powi(15);
        let via_log: f64 = multinomial_pmf(&[7, 15], &[0.3, 0.7]);
        assert!((direct - via_log).abs() / direct < 1e-12);
        let zero: f64 = multinomial_pmf(&[22, 0], &[1.0, 0.0]);
        assert!((zero - 1.0).abs() < 1e-12);
    }

    #[test]
    fn below_m_is_zero_and_dimensions_checked() {
        let f = StochasticMatrix::<f64>::identity(1);
        let x = solve_recurrence(&f, 3, 10).unwrap();
        assert_eq!(x.mass(&[2]), 0.0);
        assert_eq!(x.mass(&[0]), 0.0);
        assert!(matches!(solve_recurrence(&f, 3, 2), Err(TheoryError::BadDimensions { .. })));
        assert!(matches!(solve_recurrence(&f, 0, 2), Err(TheoryError::BadDimensions { .. })));
    }

    #[test]
    fn refuses_oversized_lattices() {
        let f = StochasticMatrix::<f64>::symmetric(4, 0.7).unwrap();
        let opts = SolverOptions { max_cells: 1000, ..Default::default() };
        assert!(matches!(solve_recurrence_with(&f, 1, 50, &opts), Err(TheoryError::CapacityExceeded { .. })));
    }

    #[test]
    fn symmetric_base_case() {
        // x((1,0)) = (2 * 1!/3) * (1/2) = 1/3.
        let f = StochasticMatrix::<f64>::symmetric(2, 0.9).unwrap();
        let x = solve_recurrence(&f, 1, 10).unwrap();
        assert!((x.mass(&[1, 0]) - 1.0 / 3.0).abs() < 1e-12);
        assert!((x.mass(&[0, 1]) - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn unperturbed_degenerate_psi() {
        let psi = TypeVector::<f64>::new(vec![1.0, 0.0]).unwrap();
        let x = solve_unperturbed_recurrence(&psi, 1, 30).unwrap();
        for (d, m) in x.iter() {
            if d[1] > 0 {
                assert_eq!(m, 0.0, "mass at {d}");
            }
        }
        assert!((x.mass(&[1, 0]) - 2.0 / 3.0).abs() < 1e-15);
        let half = TypeVector::<f64>::new(vec![0.5, 0.5]).unwrap();
        let x = solve_unperturbed_recurrence(&half, 1, 5).unwrap();
        assert!((x.mass(&[1, 0]) - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(TypeVector::new(vec![0.5, 0.4]).unwrap_err(), TheoryError::BadPsi);
    }
}
