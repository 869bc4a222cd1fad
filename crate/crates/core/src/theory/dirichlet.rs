use rand::Rng;
use rand_distr::{Distribution, Gamma};

use super::{TheoryError, TypeVector};
use crate::scalar::Scalar;

/// One draw from `Dirichlet(counts)`, via normalized `Gamma(count, 1)` variates.
pub fn dirichlet_psi_sample<T: Scalar, R: Rng + ?Sized>(
    counts: &[u64],
    rng: &mut R,
) -> Result<TypeVector<T>, TheoryError> {
    if counts.is_empty() || counts.contains(&0) {
        return Err(TheoryError::BadCounts);
    }
    if counts.len() == 1 {
        return TypeVector::new(vec![T::one()]);
    }
    let draws: Vec<f64> =
        counts.iter().map(|&a| Gamma::new(a as f64, 1.0).expect("positive shape").sample(rng)).collect();
    let total: f64 = draws.iter().sum();
    let mut psi: Vec<T> = draws.iter().map(|&g| T::lit(g / total)).collect();
    // Push the rounding residue into the largest coordinate.
    let sum: T = psi.iter().copied().sum();
    let (imax, _) = psi.iter().enumerate().max_by(|a, b| a.1.partial_cmp(b.1).expect("finite")).expect("nonempty");
    psi[imax] = psi[imax] + (T::one() - sum);
    TypeVector::new(psi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    #[test]
    fn rejects_bad_counts() {
        let mut rng = stream(0, 0);
        assert_eq!(dirichlet_psi_sample::<f64, _>(&[1, 0], &mut rng).unwrap_err(), TheoryError::BadCounts);
        assert_eq!(dirichlet_psi_sample::<f64, _>(&[], &mut rng).unwrap_err(), TheoryError::BadCounts);
    }

    #[test]
    fn single_type_is_degenerate() {
        let mut rng = stream(0, 0);
        for _ in 0..10 {
            assert_eq!(dirichlet_psi_sample::<f64, _>(&[7], &mut rng).unwrap().as_slice(), &[1.0]);
        }
    }

    #[test]
    fn mean_of_symmetric_parameters() {
        // Dirichlet(5,5): mean 1/2, variance ab/((a+b)^2 (a+b+1)) = 25/1100.
        let mut rng = stream(11, 0);
        let n = 20_000;
        let mean: f64 =
            (0..n).map(|_| dirichlet_psi_sample::<f64, _>(&[5, 5], &mut rng).unwrap()[0]).sum::<f64>() / n as f64;
        let sd = (25.0f64 / 1100.0 / n as f64).sqrt();
        assert!((mean - 0.5).abs() < 3.0 * sd, "mean {mean}");
    }
}
