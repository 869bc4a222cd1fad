use rand::Rng;

use crate::scalar::Scalar;

/// Draws an index with probability proportional to `probs` (assumed to sum
/// to one). Rounding slack at the top end falls back to the last index with
/// positive probability.
pub(crate) fn categorical<T: Scalar, R: Rng + ?Sized>(probs: &[T], rng: &mut R) -> usize {
    let u = T::lit(rng.random::<f64>());
    let mut acc = T::zero();
    for (i, &p) in probs.iter().enumerate() {
        acc = acc + p;
        if u < acc {
            return i;
        }
    }
    probs.iter().rposition(|&p| p > T::zero()).unwrap_or(probs.len() - 1)
}

pub(crate) fn is_probability_vector<T: Scalar>(probs: &[T]) -> bool {
    !probs.is_empty()
        && probs.iter().all(|&p| p >= T::zero() && p <= T::one())
        && (probs.iter().copied().sum::<T>() - T::one()).abs() <= T::stochastic_tol()
}
