//! Scalar abstractions.
//!
//! Probability algebra (acceptance, residuals, reach probabilities, weights,
//! soft counts) only needs field arithmetic and an order, so it is written
//! against [`Scalar`], which exact rationals satisfy. Anything that takes a
//! logarithm needs [`Real`].

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Float, FromPrimitive, Num, Signed, ToPrimitive};

/// Probability scalar: `f32`, `f64` or an exact rational.
pub trait Scalar:
    Num + Signed + Clone + Debug + PartialOrd + FromPrimitive + ToPrimitive + Send + Sync + 'static
{
    /// Lossy conversion used for user-facing output and binning.
    fn as_f64(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Conversion from `f64`; exact for rationals.
    fn lit(value: f64) -> Self {
        Self::from_f64(value).expect("finite literal")
    }

    fn min_of(a: Self, b: Self) -> Self {
        if b < a {
            b
        } else {
            a
        }
    }

    fn max_of(a: Self, b: Self) -> Self {
        if b > a {
            b
        } else {
            a
        }
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
impl Scalar for BigRational {}

/// Floating point scalar, needed for losses and Dirichlet sampling.
pub trait Real: Scalar + Float + Copy + std::fmt::Display {}

impl Real for f32 {}
impl Real for f64 {}

/// Exact rational from an `f64`, mirroring the binary value bit for bit.
pub fn exact(value: f64) -> BigRational {
    BigRational::from_float(value).unwrap_or_else(|| BigRational::from_integer(BigInt::from(0)))
}
