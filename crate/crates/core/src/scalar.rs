//! Scalar types usable as edge weights and algorithm parameters.
//!
//! The matchers, the exact oracle and the verifier are written against
//! [`Scalar`] so they run unchanged on `f32`, `f64` and exact rationals
//! ([`Rational64`]). Every scalar must also convert exactly into a
//! [`BigRational`], which the verifier uses for its feasibility test.

use std::fmt::{Debug, Display};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};
use num_traits::{FromPrimitive, Num, ToPrimitive};

/// A weight / parameter type.
pub trait Scalar:
    Copy + PartialOrd + Num + FromPrimitive + ToPrimitive + Debug + Display + FromStr + Send + Sync + 'static
{
    /// `false` for NaN and the infinities; always `true` for exact types.
    fn is_finite_value(self) -> bool;

    /// The exact rational value, or `None` when the value is not finite.
    fn to_rational(self) -> Option<BigRational>;

    /// Lossy conversion used for reporting.
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

macro_rules! impl_float_scalar {
    ($f:ty) => {
        impl Scalar for $f {
            fn is_finite_value(self) -> bool {
                self.is_finite()
            }

            fn to_rational(self) -> Option<BigRational> {
                BigRational::from_float(self)
            }
        }
    };
}

impl_float_scalar!(f32);
impl_float_scalar!(f64);

impl Scalar for Rational64 {
    fn is_finite_value(self) -> bool {
        true
    }

    fn to_rational(self) -> Option<BigRational> {
        Some(BigRational::new(
            BigInt::from(*self.numer()),
            BigInt::from(*self.denom()),
        ))
    }
}

/// Sum of a sequence of scalars, left to right.
pub fn sum<T: Scalar>(values: impl IntoIterator<Item = T>) -> T {
    values.into_iter().fold(T::zero(), |acc, x| acc + x)
}
