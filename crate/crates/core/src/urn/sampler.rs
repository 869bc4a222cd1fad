use std::marker::PhantomData;

use rand::Rng;

use super::UrnCount;
use crate::graph::PerturbationSchedule;
use crate::matrix::{SquareMatrix, StochasticMatrix};
use crate::sampling::categorical;
use crate::scalar::Scalar;

/// Source of random replacement matrices `R_n^{(i)}`.
///
/// Column `j` of a realized matrix is the vector of balls added when colour
/// `j` is drawn. The urn only ever consumes the drawn colour's column, so
/// implementations provide that column's law directly; `sample_matrix`
/// assembles full matrices for auditing.
pub trait ReplacementSampler {
    type Count: UrnCount;
    type Real: Scalar;

    fn colours(&self) -> usize;

    /// Column weight of every realized matrix.
    fn gamma1(&self) -> Self::Count;

    /// Column weight of the generating matrices (the balance).
    fn gamma2(&self) -> Self::Real;

    /// `H_n = E[R_n | past]`.
    fn generating_matrix(&self, n: u64) -> SquareMatrix<Self::Real>;

    fn sample_column<R: Rng + ?Sized>(&self, n: u64, colour: usize, rng: &mut R, out: &mut [Self::Count]);

    /// A full matrix with independently drawn columns.
    fn sample_matrix<R: Rng + ?Sized>(&self, n: u64, rng: &mut R) -> SquareMatrix<Self::Count> {
        let dim = self.colours();
        let mut m = SquareMatrix::filled(dim, Self::Count::zero());
        let mut col = vec![Self::Count::zero(); dim];
        for j in 0..dim {
            self.sample_column(n, j, rng, &mut col);
            for (k, &c) in col.iter().enumerate() {
                m.set(k, j, c);
            }
        }
        m
    }
}

/// Column `l` is the unit vector `e_k` with probability `eps^{(n)}_{l,k}`,
/// so `H_n = F_n^T` and `gamma1 = gamma2 = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct BernoulliColumnSampler<T, C = u64> {
    schedule: PerturbationSchedule<T>,
    _count: PhantomData<C>,
}

/// Integer-count sampler for a fixed perturbation matrix.
pub fn bernoulli_column_sampler<T: Scalar>(f_n: StochasticMatrix<T>) -> BernoulliColumnSampler<T, u64> {
    BernoulliColumnSampler::from_schedule(PerturbationSchedule::constant(f_n))
}

impl<T: Scalar, C: UrnCount> BernoulliColumnSampler<T, C> {
    pub fn from_schedule(schedule: PerturbationSchedule<T>) -> Self {
        BernoulliColumnSampler { schedule, _count: PhantomData }
    }

    pub fn schedule(&self) -> &PerturbationSchedule<T> {
        &self.schedule
    }
}

impl<T: Scalar + UrnCount> BernoulliColumnSampler<T, T> {
    /// Same law with real-valued ball counts.
    pub fn real(f_n: StochasticMatrix<T>) -> Self {
        Self::from_schedule(PerturbationSchedule::constant(f_n))
    }
}

impl<T: Scalar, C: UrnCount> ReplacementSampler for BernoulliColumnSampler<T, C> {
    type Count = C;
    type Real = T;

    fn colours(&self) -> usize {
        self.schedule.num_types()
    }

    fn gamma1(&self) -> C {
        C::one()
    }

    fn gamma2(&self) -> T {
        T::one()
    }

    fn generating_matrix(&self, n: u64) -> SquareMatrix<T> {
        self.schedule.at(n).transpose()
    }

    fn sample_column<R: Rng + ?Sized>(&self, n: u64, colour: usize, rng: &mut R, out: &mut [C]) {
        let f_n = self.schedule.at(n);
        let k = categorical(f_n.row(colour), rng);
        out.fill(C::zero());
        out[k] = C::one();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    #[test]
    fn identity_gives_identity_matrices() {
        let s = bernoulli_column_sampler(StochasticMatrix::<f64>::identity(3));
        let mut rng = stream(0, 0);
        for n in 1..50 {
            let r = s.sample_matrix(n, &mut rng);
            assert_eq!(r.as_slice(), &[1, 0, 0, 0, 1, 0, 0, 0, 1]);
        }
    }

    #[test]
    fn columns_are_indicators() {
        let f = StochasticMatrix::from_rows(&[vec![0.2, 0.3, 0.5], vec![0.6, 0.2, 0.2], vec![0.1, 0.1, 0.8]]).unwrap();
        let s = bernoulli_column_sampler(f.clone());
        let mut rng = stream(1, 0);
        for _ in 0..500 {
            let r = s.sample_matrix(1, &mut rng);
            for j in 0..3 {
                assert_eq!(r.column(j).iter().sum::<u64>(), 1);
            }
        }
        assert_eq!(s.generating_matrix(1), f.transpose());
    }
}
