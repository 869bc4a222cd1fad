use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumCast};

/// Floating point type the numerical routines are generic over (`f32` or `f64`).
pub trait Scalar:
    Float + FromPrimitive + NumCast + Sum + Debug + Display + LowerExp + Default + Send + Sync + 'static
{
    /// Allowed deviation of a probability vector's sum from one.
    fn stochastic_tol() -> Self;

    /// Accepted sup-norm residual of a stationary vector, `|psi F - psi|`.
    fn residual_tol() -> Self;

    /// Converts a literal. Panics only if the value is not representable at all.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }

    #[inline]
    fn from_count(x: u64) -> Self {
        Self::from_u64(x).expect("count representable in scalar type")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f64 {
    fn stochastic_tol() -> Self {
        1e-12
    }

    fn residual_tol() -> Self {
        1e-12
    }
}

impl Scalar for f32 {
    fn stochastic_tol() -> Self {
        1e-5
    }

    fn residual_tol() -> Self {
        1e-5
    }
}
