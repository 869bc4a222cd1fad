use super::recurrence::multinomial_coefficient;
use super::stationary::stationary_type_distribution;
use super::{TheoryError, TypeVector};
use crate::degree::compositions;
use crate::graph::PerturbationSchedule;
use crate::matrix::{SquareMatrix, StochasticMatrix};
use crate::scalar::Scalar;

fn weight(v: &[u32]) -> u64 {
    v.iter().map(|&c| c as u64).sum()
}

fn pool_fraction<T: Scalar>(count: u64, num_edges_prev: u64) -> T {
    T::from_count(count) / T::from_count(2 * num_edges_prev)
}

fn check_pool(d: &[u32], num_edges_prev: u64, m: usize) -> Result<(), TheoryError> {
    if m == 0 {
        return Err(TheoryError::BadArgs("M must be positive".into()));
    }
    if num_edges_prev == 0 || 2 * num_edges_prev < weight(d) {
        return Err(TheoryError::BadArgs(format!(
            "2|E_(n-1)| = {} is smaller than s(d) = {}",
            2 * num_edges_prev,
            weight(d)
        )));
    }
    Ok(())
}

/// `p_d^{(n)}(0) = (1 - s(d) / (2|E_{n-1}|))^M`: a vertex of degree `d`
/// receives none of the `M` new edges.
pub fn exact_no_edge_probability<T: Scalar>(d: &[u32], num_edges_prev: u64, m: usize) -> Result<T, TheoryError> {
    check_pool(d, num_edges_prev, m)?;
    Ok((T::one() - pool_fraction::<T>(weight(d), num_edges_prev)).powi(m as i32))
}

/// `beta(i)`: all `N x N` nonnegative integer matrices whose column `l`
/// sums to `i_l`. Entry `(k, l)` counts edges born with type `k` and
/// perturbed into type `l`.
pub fn beta_set(i: &[u32]) -> Vec<SquareMatrix<u32>> {
    let n = i.len();
    let columns: Vec<Vec<Vec<u32>>> = i.iter().map(|&il| compositions(il, n).collect()).collect();
    let mut out = Vec::new();
    let mut choice = vec![0usize; n];
    loop {
        let mut m = SquareMatrix::filled(n, 0u32);
        for (l, &c) in choice.iter().enumerate() {
            for (k, &v) in columns[l][c].iter().enumerate() {
                m.set(k, l, v);
            }
        }
        out.push(m);
        // Odometer over the column choices.
        let mut pos = 0;
        loop {
            if pos == n {
                return out;
            }
            choice[pos] += 1;
            if choice[pos] < columns[pos].len() {
                break;
            }
            choice[pos] = 0;
            pos += 1;
        }
    }
}

/// `alpha(d)`: increments `i <= d` (componentwise) with `1 <= s(i) <= M`.
pub fn alpha_set(d: &[u32], m: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    for w in 1..=m as u32 {
        out.extend(compositions(w, d.len()).filter(|i| i.iter().zip(d).all(|(a, b)| a <= b)));
    }
    out
}

/// One term `p-hat` of the attachment probability: a vertex whose degree
/// before the step is `d_prev` receives `I_{k,l}` edges born with type `k`
/// and perturbed to `l`, for every `k, l`, and no other edge.
///
/// `target` is the increment `i`; `index` must lie in `beta(target)` with
/// `s(i) <= M`.
pub fn attachment_term<T: Scalar>(
    d_prev: &[u32],
    target: &[u32],
    index: &SquareMatrix<u32>,
    num_edges_prev: u64,
    m: usize,
    f_n: &StochasticMatrix<T>,
) -> Result<T, TheoryError> {
    let n = f_n.dim();
    if d_prev.len() != n || target.len() != n || index.dim() != n {
        return Err(TheoryError::BadArgs(format!("dimension mismatch with {n} types")));
    }
    check_pool(d_prev, num_edges_prev, m)?;
    for (l, &il) in target.iter().enumerate() {
        let col: u64 = index.column(l).iter().map(|&v| v as u64).sum();
        if col != il as u64 {
            return Err(TheoryError::BadIndexMatrix(format!("column {} sums to {col}, expected {il}", l + 1)));
        }
    }
    let s_i = weight(target);
    if s_i > m as u64 {
        return Err(TheoryError::BadIndexMatrix(format!("s(i) = {s_i} exceeds M = {m}")));
    }
    // M! / (prod I_{k,l}! (M - s(i))!) is the multinomial of the entries
    // together with the M - s(i) edges that land elsewhere.
    let mut parts: Vec<u32> = index.as_slice().to_vec();
    parts.push((m as u64 - s_i) as u32);
    let coeff: T = multinomial_coefficient(&parts);

    let mut prod = T::one();
    for k in 0..n {
        let hit = pool_fraction::<T>(d_prev[k] as u64, num_edges_prev);
        for l in 0..n {
            let c = index.get(k, l);
            if c > 0 {
                prod = prod * (hit * f_n.get(k, l)).powi(c as i32);
            }
        }
    }
    let miss = T::one() - pool_fraction::<T>(weight(d_prev), num_edges_prev);
    Ok(coeff * prod * miss.powi((m as u64 - s_i) as i32))
}

/// `p^{(n)}_{d-i}(i)`: probability that a vertex with degree `d_prev`
/// gains exactly `i_l` new edges of each type `l`, as the sum of
/// [`attachment_term`] over `beta(i)`.
pub fn attachment_probability<T: Scalar>(
    d_prev: &[u32],
    i: &[u32],
    num_edges_prev: u64,
    m: usize,
    f_n: &StochasticMatrix<T>,
) -> Result<T, TheoryError> {
    check_pool(d_prev, num_edges_prev, m)?;
    if weight(i) > m as u64 {
        return Ok(T::zero());
    }
    beta_set(i).iter().map(|index| attachment_term(d_prev, i, index, num_edges_prev, m, f_n)).sum()
}

/// `q^{(n)}(d)`: the newborn vertex ends up with degree `d` when each of
/// its `M` edges is born with type `k` w.p. `psi_n^{(k)}` and then
/// perturbed by `F_n`. Evaluated as the sum over `beta(d)`.
pub fn new_vertex_probability<T: Scalar>(d: &[u32], psi_n: &[T], f_n: &StochasticMatrix<T>, m: usize) -> T {
    if weight(d) != m as u64 {
        return T::zero();
    }
    let n = f_n.dim();
    beta_set(d)
        .iter()
        .map(|index| {
            let coeff: T = multinomial_coefficient(index.as_slice());
            let mut prod = T::one();
            for k in 0..n {
                for l in 0..n {
                    let c = index.get(k, l);
                    if c > 0 {
                        prod = prod * (psi_n[k] * f_n.get(k, l)).powi(c as i32);
                    }
                }
            }
            coeff * prod
        })
        .sum()
}

/// Large-`n` limits of the one-step quantities for a fixed degree `d`.
#[derive(Debug, Clone, PartialEq)]
pub struct LimitValues<T> {
    /// `u(d) = s(d) / 2`.
    pub u: T,
    /// `r^{(l)}(d - e_l) = (d - e_l)^T F_{.,l} / 2`, zero when `d_l = 0`.
    pub r: Vec<T>,
    /// `q(d) = 1{M = s(d)} M! prod_l (sum_k psi_k eps_{k,l})^{d_l} / d_l!`.
    pub q: T,
}

pub fn limit_values<T: Scalar>(d: &[u32], m: usize, f: &StochasticMatrix<T>, psi: &TypeVector<T>) -> LimitValues<T> {
    let n = f.dim();
    let half = T::lit(0.5);
    let r = (0..n)
        .map(|l| {
            if d[l] == 0 {
                return T::zero();
            }
            (0..n).map(|k| T::from_count(d[k] as u64 - (k == l) as u64) * f.get(k, l)).sum::<T>() * half
        })
        .collect();
    let q = if weight(d) == m as u64 {
        let newborn = f.matrix().left_mul(psi.as_slice());
        let fact = |c: u64| (1..=c).fold(T::one(), |acc, j| acc * T::from_count(j));
        let mut q = fact(m as u64);
        for l in 0..n {
            q = q * newborn[l].powi(d[l] as i32) / fact(d[l] as u64);
        }
        q
    } else {
        T::zero()
    };
    LimitValues { u: T::from_count(weight(d)) * half, r, q }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticRow<T> {
    pub n: u64,
    /// `u_n(d) = n (1 - p_d^{(n)}(0))`.
    pub u_n: T,
    /// `n p^{(n)}_{d-e_l}(e_l)` per type; zero when `d_l = 0`.
    pub np: Vec<T>,
    /// `q^{(n)}(d)` with the limiting type vector and `F_n`.
    pub q_n: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LimitDiagnostics<T> {
    pub limits: LimitValues<T>,
    pub rows: Vec<DiagnosticRow<T>>,
}

/// Evaluates the one-step quantities at each `n` in `steps` using
/// `|E_{n-1}| = |E_0| + M (n - 1)`; steps where the pool is still smaller
/// than `s(d)` are skipped.
pub fn limit_diagnostics<T: Scalar>(
    d: &[u32],
    m: usize,
    initial_edges: u64,
    schedule: &PerturbationSchedule<T>,
    steps: &[u64],
) -> Result<LimitDiagnostics<T>, TheoryError> {
    let f = schedule.limit();
    let n_types = f.dim();
    if d.len() != n_types {
        return Err(TheoryError::BadArgs(format!("degree has {} entries for {n_types} types", d.len())));
    }
    if m == 0 {
        return Err(TheoryError::BadArgs("M must be positive".into()));
    }
    let psi = stationary_type_distribution(f)?;
    let limits = limit_values(d, m, f, &psi);
    let mut rows = Vec::new();
    for &n in steps {
        if n == 0 {
            continue;
        }
        let edges_prev = initial_edges + m as u64 * (n - 1);
        if edges_prev == 0 || 2 * edges_prev < weight(d) {
            continue;
        }
        let f_n = schedule.at(n);
        let nt = T::from_count(n);
        let u_n = nt * (T::one() - exact_no_edge_probability::<T>(d, edges_prev, m)?);
        let mut np = Vec::with_capacity(n_types);
        for l in 0..n_types {
            if d[l] == 0 {
                np.push(T::zero());
                continue;
            }
            let mut prev = d.to_vec();
            prev[l] -= 1;
            let mut unit = vec![0u32; n_types];
            unit[l] = 1;
            np.push(nt * attachment_probability(&prev, &unit, edges_prev, m, &f_n)?);
        }
        let q_n = new_vertex_probability(d, psi.as_slice(), &f_n, m);
        rows.push(DiagnosticRow { n, u_n, np, q_n });
    }
    Ok(LimitDiagnostics { limits, rows })
}

/// Both sides of `|(1-x)^n - (1-nx)| <= C(n,2) x^2`.
///
/// For `n x < 1` the left side is summed as the alternating series
/// `sum_{j>=2} C(n,j) (-x)^j`, avoiding the cancellation of the direct form.
pub fn binomial_bound_terms<T: Scalar>(n: u64, x: T) -> (T, T) {
    let nt = T::from_count(n);
    let c2 = T::from_count(n * n.saturating_sub(1) / 2);
    let rhs = c2 * x * x;
    if n <= 2 || nt * x < T::one() {
        let mut tail = T::zero();
        let mut term = rhs;
        for j in 2..n {
            // C(n, j+1) x^{j+1} from C(n, j) x^j.
            term = term * T::from_count(n - j) / T::from_count(j + 1) * x;
            if term == T::zero() {
                break;
            }
            tail = if j % 2 == 0 { tail - term } else { tail + term };
        }
        // The series starts with +C(n,2) x^2; the tail is nonpositive.
        ((rhs + tail).abs(), rhs)
    } else {
        (((T::one() - x).powi(n as i32) - (T::one() - nt * x)).abs(), rhs)
    }
}

/// Checks the binomial bound for `n >= 1`, `x` in `[0, 1]`.
pub fn lemma_binomial_bound_check<T: Scalar>(n: u64, x: T) -> bool {
    let (lhs, rhs) = binomial_bound_terms(n, x);
    lhs <= rhs
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f_sym() -> StochasticMatrix<f64> {
        StochasticMatrix::from_rows(&[vec![0.9, 0.1], vec![0.1, 0.9]]).unwrap()
    }

    #[test]
    fn no_edge_probability_examples() {
        let p: f64 = exact_no_edge_probability(&[1, 1], 10, 2).unwrap();
        assert!((p - 0.81).abs() < 1e-15);
        assert_eq!(exact_no_edge_probability::<f64>(&[0, 0], 10, 3).unwrap(), 1.0);
        assert_eq!(exact_no_edge_probability::<f64>(&[3, 1], 2, 1).unwrap(), 0.0);
        assert!(exact_no_edge_probability::<f64>(&[3, 2], 2, 1).is_err());
        assert!(exact_no_edge_probability::<f64>(&[1], 2, 0).is_err());
    }

    #[test]
    fn single_edge_attachment_by_hand() {
        // d = (2,1), l = 1: d - e_1 = (1,1), so (1/20) 0.9 + (1/20) 0.1.
        let p: f64 = attachment_probability(&[1, 1], &[1, 0], 10, 1, &f_sym()).unwrap();
        assert!((p - 0.05).abs() < 1e-15);
    }

    #[test]
    fn empty_index_reduces_to_no_edge() {
        let zero = SquareMatrix::filled(2, 0u32);
        let a: f64 = attachment_term(&[2, 3], &[0, 0], &zero, 7, 3, &f_sym()).unwrap();
        let b: f64 = exact_no_edge_probability(&[2, 3], 7, 3).unwrap();
        assert!((a - b).abs() < 1e-15);
    }

    #[test]
    fn index_matrix_validation() {
        let m = SquareMatrix::from_rows(&[vec![1, 0], vec![0, 0]]).unwrap();
        let err = attachment_term::<f64>(&[1, 1], &[0, 1], &m, 10, 2, &f_sym()).unwrap_err();
        assert!(matches!(err, TheoryError::BadIndexMatrix(_)));
        let m = SquareMatrix::from_rows(&[vec![2, 0], vec![0, 1]]).unwrap();
        let err = attachment_term::<f64>(&[1, 1], &[2, 1], &m, 10, 2, &f_sym()).unwrap_err();
        assert!(matches!(err, TheoryError::BadIndexMatrix(_)));
    }

    #[test]
    fn beta_and_alpha_sets() {
        // Column sums (2,1) in 2 types: 3 ways for column 1, 2 for column 2.
        assert_eq!(beta_set(&[2, 1]).len(), 6);
        assert_eq!(beta_set(&[0, 0]).len(), 1);
        let a = alpha_set(&[2, 1], 2);
        assert_eq!(a, vec![vec![0, 1], vec![1, 0], vec![1, 1], vec![2, 0]]);
    }

    #[test]
    fn limit_values_by_hand() {
        let psi = TypeVector::new(vec![0.5, 0.5]).unwrap();
        let lim = limit_values(&[2, 1], 2, &f_sym(), &psi);
        assert_eq!(lim.u, 1.5);
        // (1,1) . (0.9, 0.1) / 2
        assert!((lim.r[0] - 0.5).abs() < 1e-15);
        assert_eq!(lim.q, 0.0);
        let lim = limit_values(&[1, 0], 1, &f_sym(), &psi);
        assert!((lim.q - 0.5).abs() < 1e-15);
        assert_eq!(lim.r[1], 0.0);
    }

    #[test]
    fn new_vertex_probability_collapses_to_multinomial() {
        let f =
            StochasticMatrix::from_rows(&[vec![0.7, 0.2, 0.1], vec![0.3, 0.3, 0.4], vec![0.05, 0.15, 0.8]]).unwrap();
        let psi = TypeVector::new(vec![0.2, 0.5, 0.3]).unwrap();
        let m = 3;
        for d in compositions(m as u32, 3) {
            let via_beta: f64 = new_vertex_probability(&d, psi.as_slice(), &f, m);
            let collapsed = limit_values(&d, m, &f, &psi).q;
            assert!((via_beta - collapsed).abs() < 1e-14, "{d:?}: {via_beta} vs {collapsed}");
        }
    }

    #[test]
    fn binomial_bound() {
        assert!(lemma_binomial_bound_check(1, 0.37f64));
        let (lhs, rhs) = binomial_bound_terms(1, 0.37f64);
        assert_eq!((lhs, rhs), (0.0, 0.0));
        let (lhs, rhs) = binomial_bound_terms(2, 0.3f64);
        assert_eq!(lhs, rhs);
        assert!((rhs - 0.09).abs() < 1e-16);
        for n in [3u64, 10, 100] {
            for x in [0.0, 1e-12, 1e-3, 0.01, 0.5, 1.0] {
                assert!(lemma_binomial_bound_check(n, x), "n={n} x={x}");
            }
        }
    }
}
