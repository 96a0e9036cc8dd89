//! Numeric abstraction shared by the exact and floating-point solvers.
//!
//! Game tables, dividends, Shapley values and core checks are written once
//! against [`Scalar`]. Exact work uses [`BigRational`]; `f64`/`f32` are used
//! when a game comes from a black-box model and ties cannot be decided anyway.

use std::fmt::{Debug, Display};

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{FromPrimitive, Num, Signed, ToPrimitive, Zero};

/// A number a characteristic function can take.
pub trait Scalar:
    Clone + PartialOrd + Debug + Display + Num + Signed + Send + Sync + 'static
{
    /// Largest integral value not greater than `self`.
    fn floor(&self) -> Self;

    /// Smallest integral value not less than `self`.
    fn ceil(&self) -> Self;

    fn from_i64(value: i64) -> Self;

    fn from_usize(value: usize) -> Self {
        Self::from_i64(value as i64)
    }

    /// `numer / denom`; `denom` must be nonzero.
    fn from_ratio(numer: i64, denom: i64) -> Self;

    fn to_f64(&self) -> f64;

    /// The value as a machine integer when it is integral and fits.
    fn to_i64_exact(&self) -> Option<i64>;

    /// Whether comparisons on this type are exact.
    ///
    /// Floating-point types report `false`; algorithms that need exact tie
    /// detection document how they degrade.
    const EXACT: bool;

    fn is_integral(&self) -> bool {
        self.floor() == *self
    }
}

macro_rules! impl_float_scalar {
    ($t:ty) => {
        impl Scalar for $t {
            fn floor(&self) -> Self {
                <$t>::floor(*self)
            }

            fn ceil(&self) -> Self {
                <$t>::ceil(*self)
            }

            fn from_i64(value: i64) -> Self {
                value as $t
            }

            fn from_ratio(numer: i64, denom: i64) -> Self {
                numer as $t / denom as $t
            }

            fn to_f64(&self) -> f64 {
                *self as f64
            }

            fn to_i64_exact(&self) -> Option<i64> {
                if self.is_finite() && <$t>::floor(*self) == *self {
                    ToPrimitive::to_i64(self)
                } else {
                    None
                }
            }

            const EXACT: bool = false;
        }
    };
}

impl_float_scalar!(f32);
impl_float_scalar!(f64);

impl Scalar for BigRational {
    fn floor(&self) -> Self {
        Ratio::floor(self)
    }

    fn ceil(&self) -> Self {
        Ratio::ceil(self)
    }

    fn from_i64(value: i64) -> Self {
        BigRational::from_integer(BigInt::from(value))
    }

    fn from_ratio(numer: i64, denom: i64) -> Self {
        BigRational::new(BigInt::from(numer), BigInt::from(denom))
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or_else(|| {
            if self.is_negative() {
                f64::NEG_INFINITY
            } else {
                f64::INFINITY
            }
        })
    }

    fn to_i64_exact(&self) -> Option<i64> {
        if self.is_integer() {
            self.numer().to_i64()
        } else {
            None
        }
    }

    const EXACT: bool = true;
}

impl Scalar for Ratio<i64> {
    fn floor(&self) -> Self {
        Ratio::floor(self)
    }

    fn ceil(&self) -> Self {
        Ratio::ceil(self)
    }

    fn from_i64(value: i64) -> Self {
        Ratio::from_integer(value)
    }

    fn from_ratio(numer: i64, denom: i64) -> Self {
        Ratio::new(numer, denom)
    }

    fn to_f64(&self) -> f64 {
        *self.numer() as f64 / *self.denom() as f64
    }

    fn to_i64_exact(&self) -> Option<i64> {
        self.is_integer().then(|| *self.numer())
    }

    const EXACT: bool = true;
}

/// Converts an exact rational to a float scalar, saturating at infinity.
pub fn rational_to<F: FromPrimitive + Zero>(value: &BigRational) -> F {
    F::from_f64(Scalar::to_f64(value)).unwrap_or_else(F::zero)
}
