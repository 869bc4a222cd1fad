use std::borrow::Cow;

use crate::matrix::{MatrixError, SquareMatrix, StochasticMatrix};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub enum ScheduleKind<T> {
    /// `F_n = F` for every step.
    Constant,
    /// `F_n = F + A / n^rho`, clamped to `[0,1]` and row-renormalised.
    Decaying { offset: SquareMatrix<T>, rho: T },
}

/// The sequence of perturbation matrices `F_n` and its limit `F`.
#[derive(Debug, Clone, PartialEq)]
pub struct PerturbationSchedule<T> {
    limit: StochasticMatrix<T>,
    kind: ScheduleKind<T>,
}

impl<T: Scalar> PerturbationSchedule<T> {
    pub fn constant(limit: StochasticMatrix<T>) -> Self {
        PerturbationSchedule { limit, kind: ScheduleKind::Constant }
    }

    /// `offset` must have zero row sums and `rho` must be positive.
    pub fn decaying(limit: StochasticMatrix<T>, offset: SquareMatrix<T>, rho: T) -> Result<Self, MatrixError> {
        let n = limit.dim();
        if offset.dim() != n {
            return Err(MatrixError::Shape { dim: n, expected: n * n, got: offset.dim() * offset.dim() });
        }
        for r in 0..n {
            let sum: T = offset.row(r).iter().copied().sum();
            if sum.abs() > T::stochastic_tol() {
                return Err(MatrixError::OffsetRowSum { row: r + 1, sum: sum.as_f64() });
            }
        }
        if !(rho > T::zero()) {
            return Err(MatrixError::DecayExponent(rho.as_f64()));
        }
        Ok(PerturbationSchedule { limit, kind: ScheduleKind::Decaying { offset, rho } })
    }

    pub fn limit(&self) -> &StochasticMatrix<T> {
        &self.limit
    }

    pub fn kind(&self) -> &ScheduleKind<T> {
        &self.kind
    }

    pub fn num_types(&self) -> usize {
        self.limit.dim()
    }

    /// `F_n` for step `n >= 1`.
    pub fn at(&self, n: u64) -> Cow<'_, StochasticMatrix<T>> {
        match &self.kind {
            ScheduleKind::Constant => Cow::Borrowed(&self.limit),
            ScheduleKind::Decaying { offset, rho } => {
                let dim = self.limit.dim();
                let scale = T::from_count(n.max(1)).powf(*rho).recip();
                let mut data = Vec::with_capacity(dim * dim);
                for k in 0..dim {
                    let row: Vec<T> = (0..dim)
                        .map(|l| (self.limit.get(k, l) + offset.get(k, l) * scale).max(T::zero()).min(T::one()))
                        .collect();
                    let sum: T = row.iter().copied().sum();
                    data.extend(row.into_iter().map(|v| v / sum));
                }
                Cow::Owned(StochasticMatrix::from_row_major(dim, data).expect("renormalised rows are stochastic"))
            }
        }
    }

    /// Relabels types by `perm` (conjugation of every `F_n`).
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let kind = match &self.kind {
            ScheduleKind::Constant => ScheduleKind::Constant,
            ScheduleKind::Decaying { offset, rho } => {
                let n = offset.dim();
                let mut m = SquareMatrix::filled(n, T::zero());
                for k in 0..n {
                    for l in 0..n {
                        m.set(perm[k], perm[l], offset.get(k, l));
                    }
                }
                ScheduleKind::Decaying { offset: m, rho: *rho }
            }
        };
        PerturbationSchedule { limit: self.limit.permuted(perm), kind }
    }
}
