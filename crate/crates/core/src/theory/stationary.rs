use std::ops::Index;

use super::TheoryError;
use crate::matrix::StochasticMatrix;
use crate::sampling::is_probability_vector;
use crate::scalar::Scalar;

/// Asymptotic edge-type proportions `psi`, a probability vector.
#[derive(Debug, Clone, PartialEq)]
pub struct TypeVector<T>(Vec<T>);

impl<T: Scalar> TypeVector<T> {
    pub fn new(psi: Vec<T>) -> Result<Self, TheoryError> {
        if !is_probability_vector(&psi) {
            return Err(TheoryError::BadPsi);
        }
        Ok(TypeVector(psi))
    }

    pub fn uniform(n: usize) -> Self {
        TypeVector(vec![T::one() / T::from_count(n as u64); n])
    }

    pub fn as_slice(&self) -> &[T] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `|psi F - psi|_inf`.
    pub fn residual(&self, f: &StochasticMatrix<T>) -> T {
        f.matrix().left_mul(&self.0).iter().zip(&self.0).map(|(&a, &b)| (a - b).abs()).fold(T::zero(), T::max)
    }

    pub fn into_vec(self) -> Vec<T> {
        self.0
    }
}

impl<T> Index<usize> for TypeVector<T> {
    type Output = T;

    fn index(&self, i: usize) -> &T {
        &self.0[i]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StationaryMethod {
    /// Gaussian elimination on `psi (F - I) = 0, sum psi = 1`.
    Direct,
    /// Iterates `psi <- psi (I + F) / 2` from the uniform vector. The lazy
    /// chain shares the stationary vector of `F` and is aperiodic, so
    /// periodic irreducible matrices converge too.
    PowerIteration { tolerance: f64, max_iterations: usize },
}

impl StationaryMethod {
    pub const DEFAULT_POWER: StationaryMethod =
        StationaryMethod::PowerIteration { tolerance: 1e-13, max_iterations: 100_000 };
}

/// Left Perron vector of `F` at eigenvalue 1, normalized to sum to one.
/// Uses the direct solve for `N <= 64` and power iteration beyond.
pub fn stationary_type_distribution<T: Scalar>(f: &StochasticMatrix<T>) -> Result<TypeVector<T>, TheoryError> {
    let method = if f.dim() <= 64 { StationaryMethod::Direct } else { StationaryMethod::DEFAULT_POWER };
    stationary_with(f, method)
}

pub fn stationary_with<T: Scalar>(
    f: &StochasticMatrix<T>,
    method: StationaryMethod,
) -> Result<TypeVector<T>, TheoryError> {
    if !f.is_irreducible() {
        return Err(TheoryError::NotIrreducible);
    }
    if f.dim() > 1 && f.has_boundary_entries() {
        log::warn!("perturbation matrix has entries equal to 0 or 1; stationary vector assumes only irreducibility");
    }
    let psi = match method {
        StationaryMethod::Direct => direct(f),
        StationaryMethod::PowerIteration { tolerance, max_iterations } => {
            power_iteration(f, T::lit(tolerance), max_iterations)?
        }
    };
    let psi = TypeVector(psi);
    let residual = psi.residual(f);
    if residual > T::residual_tol() {
        return Err(TheoryError::NoConvergence { iterations: 0, residual: residual.as_f64() });
    }
    Ok(psi)
}

fn direct<T: Scalar>(f: &StochasticMatrix<T>) -> Vec<T> {
    let n = f.dim();
    // Rows of A are equations: (F^T - I) psi = 0, last one replaced by sum = 1.
    let mut a = vec![vec![T::zero(); n + 1]; n];
    for (i, row) in a.iter_mut().enumerate().take(n - 1) {
        for (j, entry) in row.iter_mut().enumerate().take(n) {
            *entry = f.get(j, i) - if i == j { T::one() } else { T::zero() };
        }
    }
    for entry in a[n - 1].iter_mut() {
        *entry = T::one();
    }

    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&x, &y| a[x][col].abs().partial_cmp(&a[y][col].abs()).expect("finite entries"))
            .expect("nonempty range");
        a.swap(col, pivot);
        let p = a[col][col];
        for r in 0..n {
            if r != col {
                let factor = a[r][col] / p;
                if factor != T::zero() {
                    for c in col..=n {
                        let v = a[col][c];
                        a[r][c] = a[r][c] - factor * v;
                    }
                }
            }
        }
    }
    let mut psi: Vec<T> = (0..n).map(|i| (a[i][n] / a[i][i]).max(T::zero())).collect();
    let sum: T = psi.iter().copied().sum();
    for p in psi.iter_mut() {
        *p = *p / sum;
    }
    psi
}

fn power_iteration<T: Scalar>(
    f: &StochasticMatrix<T>,
    tolerance: T,
    max_iterations: usize,
) -> Result<Vec<T>, TheoryError> {
    let n = f.dim();
    let half = T::lit(0.5);
    let mut psi = vec![T::one() / T::from_count(n as u64); n];
    let mut last_change = T::infinity();
    for _ in 0..max_iterations {
        let moved = f.matrix().left_mul(&psi);
        let next: Vec<T> = psi.iter().zip(&moved).map(|(&p, &m)| half * (p + m)).collect();
        let sum: T = next.iter().copied().sum();
        let next: Vec<T> = next.into_iter().map(|v| v / sum).collect();
        let scale = next.iter().copied().fold(T::zero(), T::max);
        last_change = next.iter().zip(&psi).map(|(&a, &b)| (a - b).abs()).fold(T::zero(), T::max);
        psi = next;
        if last_change <= tolerance * scale {
            return Ok(psi);
        }
    }
    Err(TheoryError::NoConvergence { iterations: max_iterations, residual: last_change.as_f64() })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(rows: &[Vec<f64>]) -> StochasticMatrix<f64> {
        StochasticMatrix::from_rows(rows).unwrap()
    }

    #[test]
    fn two_state_chain() {
        // psi F = psi with F = [[0.8,0.2],[0.4,0.6]]: 0.2 psi_1 = 0.4 psi_2.
        let psi = stationary_type_distribution(&f(&[vec![0.8, 0.2], vec![0.4, 0.6]])).unwrap();
        assert!((psi[0] - 2.0 / 3.0).abs() < 1e-14);
        assert!((psi[1] - 1.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn symmetric_gives_uniform() {
        for n in 2..6 {
            for diag in [0.1, 0.5, 0.9] {
                let m = StochasticMatrix::symmetric(n, diag).unwrap();
                let psi = stationary_type_distribution(&m).unwrap();
                for l in 0..n {
                    assert!((psi[l] - 1.0 / n as f64).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn single_type() {
        let psi = stationary_type_distribution(&StochasticMatrix::<f64>::identity(1)).unwrap();
        assert_eq!(psi.as_slice(), &[1.0]);
    }

    #[test]
    fn reducible_is_rejected() {
        let err = stationary_type_distribution(&StochasticMatrix::<f64>::identity(3)).unwrap_err();
        assert_eq!(err, TheoryError::NotIrreducible);
    }

    #[test]
    fn periodic_chain_converges_with_lazy_iteration() {
        let cycle = f(&[vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0], vec![1.0, 0.0, 0.0]]);
        let psi = stationary_with(&cycle, StationaryMethod::DEFAULT_POWER).unwrap();
        for l in 0..3 {
            assert!((psi[l] - 1.0 / 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn direct_and_power_agree() {
        let m = f(&[vec![0.5, 0.3, 0.2], vec![0.1, 0.1, 0.8], vec![0.6, 0.0, 0.4]]);
        let a = stationary_with(&m, StationaryMethod::Direct).unwrap();
        let b = stationary_with(&m, StationaryMethod::DEFAULT_POWER).unwrap();
        for l in 0..3 {
            assert!((a[l] - b[l]).abs() < 1e-12);
        }
        assert!(a.residual(&m) <= 1e-12);
    }

    #[test]
    fn power_budget_exhaustion() {
        let m = f(&[vec![0.999, 0.001], vec![0.001, 0.999]]);
        let err = stationary_with(&m, StationaryMethod::PowerIteration { tolerance: 1e-15, max_iterations: 2 });
        // Starts at the uniform vector, which is already stationary here.
        assert!(err.is_ok());
        let m = f(&[vec![0.999, 0.001], vec![0.002, 0.998]]);
        let err = stationary_with(&m, StationaryMethod::PowerIteration { tolerance: 1e-15, max_iterations: 2 });
        assert!(matches!(err, Err(TheoryError::NoConvergence { iterations: 2, .. })));
    }

    #[test]
    fn single_precision() {
        let m = StochasticMatrix::<f32>::from_rows(&[vec![0.8, 0.2], vec![0.4, 0.6]]).unwrap();
        let psi = stationary_type_distribution(&m).unwrap();
        assert!((psi[0] - 2.0 / 3.0).abs() < 1e-6);
    }
}
