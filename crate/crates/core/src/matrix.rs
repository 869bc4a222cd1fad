use std::collections::VecDeque;
use std::fmt;

use thiserror::Error;

use crate::scalar::Scalar;

/// Entries below this are structural zeros when deciding irreducibility.
pub const IRREDUCIBILITY_THRESHOLD: f64 = 1e-15;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MatrixError {
    #[error("matrix has no rows")]
    Empty,
    #[error("expected {expected} entries for a {dim}x{dim} matrix, got {got}")]
    Shape { dim: usize, expected: usize, got: usize },
    /// Row and column are 1-based.
    #[error("entry ({row},{col}) = {value} lies outside [0,1]")]
    EntryOutOfRange { row: usize, col: usize, value: f64 },
    /// Row is 1-based.
    #[error("row {row} sums to {sum}, not 1")]
    RowSum { row: usize, sum: f64 },
    #[error("offset matrix row {row} sums to {sum}, not 0")]
    OffsetRowSum { row: usize, sum: f64 },
    #[error("decay exponent must be positive, got {0}")]
    DecayExponent(f64),
}

/// Dense square matrix, row-major.
#[derive(Clone, PartialEq)]
pub struct SquareMatrix<T> {
    dim: usize,
    data: Vec<T>,
}

impl<T: Copy> SquareMatrix<T> {
    pub fn from_row_major(dim: usize, data: Vec<T>) -> Result<Self, MatrixError> {
        if dim == 0 {
            return Err(MatrixError::Empty);
        }
        if data.len() != dim * dim {
            return Err(MatrixError::Shape { dim, expected: dim * dim, got: data.len() });
        }
        Ok(SquareMatrix { dim, data })
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self, MatrixError> {
        let dim = rows.len();
        let data: Vec<T> = rows.iter().flatten().copied().collect();
        if rows.iter().any(|r| r.len() != dim) {
            return Err(MatrixError::Shape { dim, expected: dim * dim, got: data.len() });
        }
        Self::from_row_major(dim, data)
    }

    pub fn filled(dim: usize, value: T) -> Self {
        SquareMatrix { dim, data: vec![value; dim * dim] }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> T {
        self.data[row * self.dim + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: T) {
        self.data[row * self.dim + col] = value;
    }

    pub fn row(&self, row: usize) -> &[T] {
        &self.data[row * self.dim..(row + 1) * self.dim]
    }

    pub fn column(&self, col: usize) -> Vec<T> {
        (0..self.dim).map(|r| self.get(r, col)).collect()
    }

    pub fn transpose(&self) -> Self {
        let n = self.dim;
        let mut data = Vec::with_capacity(n * n);
        for c in 0..n {
            for r in 0..n {
                data.push(self.get(r, c));
            }
        }
        SquareMatrix { dim: n, data }
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn map<U: Copy>(&self, f: impl Fn(T) -> U) -> SquareMatrix<U> {
        SquareMatrix { dim: self.dim, data: self.data.iter().map(|&x| f(x)).collect() }
    }
}

impl<T: Scalar> SquareMatrix<T> {
    pub fn identity(dim: usize) -> Self {
        let mut m = Self::filled(dim, T::zero());
        for i in 0..dim {
            m.set(i, i, T::one());
        }
        m
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.data.iter().zip(&other.data).map(|(&a, &b)| (a - b).abs()).fold(T::zero(), T::max)
    }

    /// `v^T A`.
    pub fn left_mul(&self, v: &[T]) -> Vec<T> {
        let n = self.dim;
        let mut out = vec![T::zero(); n];
        for (k, &vk) in v.iter().enumerate() {
            for (l, o) in out.iter_mut().enumerate() {
                *o = *o + vk * self.get(k, l);
            }
        }
        out
    }
}

impl<T: fmt::Debug> fmt::Debug for SquareMatrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries((0..self.dim).map(|r| &self.data[r * self.dim..(r + 1) * self.dim])).finish()
    }
}

/// A validated row-stochastic matrix of type-flip probabilities `eps_{k,l}`.
#[derive(Clone, PartialEq)]
pub struct StochasticMatrix<T>(SquareMatrix<T>);

impl<T: Scalar> StochasticMatrix<T> {
    pub fn new(matrix: SquareMatrix<T>) -> Result<Self, MatrixError> {
        let n = matrix.dim();
        for r in 0..n {
            for c in 0..n {
                let v = matrix.get(r, c);
                if !(v >= T::zero() && v <= T::one()) {
                    return Err(MatrixError::EntryOutOfRange { row: r + 1, col: c + 1, value: v.as_f64() });
                }
            }
            let sum: T = matrix.row(r).iter().copied().sum();
            if (sum - T::one()).abs() > T::stochastic_tol() {
                return Err(MatrixError::RowSum { row: r + 1, sum: sum.as_f64() });
            }
        }
        Ok(StochasticMatrix(matrix))
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self, MatrixError> {
        Self::new(SquareMatrix::from_rows(rows)?)
    }

    pub fn from_row_major(dim: usize, data: Vec<T>) -> Result<Self, MatrixError> {
        Self::new(SquareMatrix::from_row_major(dim, data)?)
    }

    pub fn identity(dim: usize) -> Self {
        StochasticMatrix(SquareMatrix::identity(dim))
    }

    /// `diag` on the diagonal, the remainder spread evenly over the other entries.
    pub fn symmetric(dim: usize, diag: T) -> Result<Self, MatrixError> {
        if dim == 0 {
            return Err(MatrixError::Empty);
        }
        if dim == 1 {
            return Ok(Self::identity(1));
        }
        let off = (T::one() - diag) / T::from_count(dim as u64 - 1);
        let mut m = SquareMatrix::filled(dim, off);
        for i in 0..dim {
            m.set(i, i, diag);
        }
        Self::new(m)
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    #[inline]
    pub fn get(&self, k: usize, l: usize) -> T {
        self.0.get(k, l)
    }

    pub fn row(&self, k: usize) -> &[T] {
        self.0.row(k)
    }

    pub fn column(&self, l: usize) -> Vec<T> {
        self.0.column(l)
    }

    pub fn matrix(&self) -> &SquareMatrix<T> {
        &self.0
    }

    pub fn transpose(&self) -> SquareMatrix<T> {
        self.0.transpose()
    }

    pub fn is_symmetric(&self) -> bool {
        let n = self.dim();
        (0..n).all(|k| (0..k).all(|l| self.get(k, l) == self.get(l, k)))
    }

    /// Strong connectivity of the digraph with an arc `k -> l` whenever
    /// `eps_{k,l}` exceeds [`IRREDUCIBILITY_THRESHOLD`].
    pub fn is_irreducible(&self) -> bool {
        let n = self.dim();
        let eps = T::lit(IRREDUCIBILITY_THRESHOLD);
        let forward = |k: usize, l: usize| self.get(k, l) > eps;
        let backward = |k: usize, l: usize| self.get(l, k) > eps;
        reaches_all(n, forward) && reaches_all(n, backward)
    }

    /// True when some entry is exactly 0 or 1.
    pub fn has_boundary_entries(&self) -> bool {
        self.0.as_slice().iter().any(|&v| v == T::zero() || v == T::one())
    }

    /// Relabels types: `out[perm[k]][perm[l]] = self[k][l]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let n = self.dim();
        let mut m = SquareMatrix::filled(n, T::zero());
        for k in 0..n {
            for l in 0..n {
                m.set(perm[k], perm[l], self.get(k, l));
            }
        }
        StochasticMatrix(m)
    }

    pub fn cast<U: Scalar>(&self) -> StochasticMatrix<U> {
        StochasticMatrix(self.0.map(|x| U::lit(x.as_f64())))
    }
}

impl<T: fmt::Debug> fmt::Debug for StochasticMatrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

fn reaches_all(n: usize, arc: impl Fn(usize, usize) -> bool) -> bool {
    let mut seen = vec![false; n];
    let mut queue = VecDeque::from([0]);
    seen[0] = true;
    while let Some(k) = queue.pop_front() {
        for l in 0..n {
            if !seen[l] && arc(k, l) {
                seen[l] = true;
                queue.push_back(l);
            }
        }
    }
    seen.into_iter().all(|s| s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_rows() {
        let err = StochasticMatrix::from_rows(&[vec![0.5, 0.5], vec![0.3, 0.6]]).unwrap_err();
        assert!(matches!(err, MatrixError::RowSum { row: 2, .. }));
        let err = StochasticMatrix::from_rows(&[vec![1.5, -0.5], vec![0.5, 0.5]]).unwrap_err();
        assert!(matches!(err, MatrixError::EntryOutOfRange { row: 1, col: 1, .. }));
        let err = StochasticMatrix::<f64>::from_row_major(2, vec![1.0, 0.0, 1.0]).unwrap_err();
        assert!(matches!(err, MatrixError::Shape { .. }));
    }

    #[test]
    fn irreducibility() {
        assert!(!StochasticMatrix::<f64>::identity(2).is_irreducible());
        assert!(StochasticMatrix::<f64>::identity(1).is_irreducible());
        let cycle =
            StochasticMatrix::from_rows(&[vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0], vec![1.0, 0.0, 0.0]]).unwrap();
        assert!(cycle.is_irreducible());
        let absorbing = StochasticMatrix::from_rows(&[vec![1.0, 0.0], vec![0.5, 0.5]]).unwrap();
        assert!(!absorbing.is_irreducible());
        let tiny = StochasticMatrix::from_rows(&[vec![1.0 - 1e-16, 1e-16], vec![0.5, 0.5]]).unwrap();
        assert!(!tiny.is_irreducible());
    }

    #[test]
    fn symmetric_constructor() {
        let f = StochasticMatrix::<f64>::symmetric(3, 0.8).unwrap();
        assert!(f.is_symmetric());
        assert!((f.get(0, 2) - 0.1).abs() < 1e-15);
    }

    #[test]
    fn permutation_conjugates() {
        let f = StochasticMatrix::from_rows(&[vec![0.8, 0.2], vec![0.4, 0.6]]).unwrap();
        let p = f.permuted(&[1, 0]);
        assert_eq!(p.row(0), &[0.6, 0.4]);
        assert_eq!(p.row(1), &[0.2, 0.8]);
    }
}
