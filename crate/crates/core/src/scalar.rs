//! Scalar types expressions can be evaluated in.
//!
//! Exact work uses [`BigRational`]; finite-difference checks use `f64` (or
//! `f32`). Anything implementing [`Scalar`] is also a [`Field`](crate::linalg::Field)
//! for the generic linear algebra.

use std::fmt::Debug;
use std::ops::Neg;

use num_bigint::{BigInt, Sign};
use num_rational::BigRational;
use num_traits::{Float, Num, Signed, ToPrimitive, Zero};

pub trait Scalar: Num + Clone + Debug + PartialEq + Neg<Output = Self> {
    fn from_bigint(n: &BigInt) -> Self;

    fn from_rational(q: &BigRational) -> Self {
        Self::from_bigint(q.numer()) / Self::from_bigint(q.denom())
    }

    /// Non-negative square root, when it exists in this type.
    fn sqrt_checked(&self) -> Option<Self>;

    fn to_f64(&self) -> f64;

    fn magnitude(&self) -> f64 {
        self.to_f64().abs()
    }
}

macro_rules! float_scalar {
    ($t:ty) => {
        impl Scalar for $t {
            fn from_bigint(n: &BigInt) -> Self {
                ToPrimitive::to_f64(n).unwrap_or(f64::NAN) as $t
            }

            fn from_rational(q: &BigRational) -> Self {
                // Ratio of f64 conversions loses everything for huge numerators,
                // so fall back to the rational's own conversion.
                ToPrimitive::to_f64(q).unwrap_or(f64::NAN) as $t
            }

            fn sqrt_checked(&self) -> Option<Self> {
                (*self >= 0.0).then(|| Float::sqrt(*self))
            }

            fn to_f64(&self) -> f64 {
                *self as f64
            }
        }
    };
}

float_scalar!(f32);
float_scalar!(f64);

impl Scalar for BigRational {
    fn from_bigint(n: &BigInt) -> Self {
        BigRational::from_integer(n.clone())
    }

    fn from_rational(q: &BigRational) -> Self {
        q.clone()
    }

    fn sqrt_checked(&self) -> Option<Self> {
        if self.is_negative() {
            return None;
        }
        if self.is_zero() {
            return Some(BigRational::zero());
        }
        let n = exact_isqrt(self.numer())?;
        let d = exact_isqrt(self.denom())?;
        Some(BigRational::new(n, d))
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
}

fn exact_isqrt(n: &BigInt) -> Option<BigInt> {
    if n.sign() == Sign::Minus {
        return None;
    }
    let s = n.sqrt();
    (&s * &s == *n).then_some(s)
}
