//! Scalar abstractions.
//!
//! Exact identities are evaluated over [`BigRational`]; floating evaluation
//! (series truncations, Monte Carlo estimators) is generic over [`Real`] so
//! that `f32` and `f64` share one code path.

use std::fmt::Debug;
use std::iter::Sum;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{Float, FromPrimitive, Num, ToPrimitive};

/// A field-like scalar that the combinatorial kernels can be evaluated in.
pub trait Scalar: Num + Clone + Debug + PartialOrd {
    fn from_biguint(n: &BigUint) -> Self;

    fn from_count(n: usize) -> Self {
        Self::from_biguint(&BigUint::from(n))
    }

    /// `num / den`; `den` must be nonzero.
    fn from_ratio(num: i64, den: i64) -> Self;
}

impl Scalar for BigRational {
    fn from_biguint(n: &BigUint) -> Self {
        BigRational::from_integer(BigInt::from(n.clone()))
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }
}

macro_rules! float_scalar {
    ($t:ty) => {
        impl Scalar for $t {
            fn from_biguint(n: &BigUint) -> Self {
                n.to_f64().map(|v| v as $t).unwrap_or(<$t>::INFINITY)
            }

            fn from_ratio(num: i64, den: i64) -> Self {
                num as $t / den as $t
            }
        }
    };
}

float_scalar!(f32);
float_scalar!(f64);

/// Floating-point scalar used by truncated series and estimators.
pub trait Real: Float + FromPrimitive + Scalar + Sum + Send + Sync + 'static {
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("finite literal")
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy)]
pub struct CompensatedSum<T> {
    sum: T,
    comp: T,
}

impl<T: Float> Default for CompensatedSum<T> {
    fn default() -> Self {
        Self::new()
    }
}

impl<T: Float> CompensatedSum<T> {
    pub fn new() -> Self {
        Self {
            sum: T::zero(),
            comp: T::zero(),
        }
    }

    pub fn add(&mut self, x: T) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp = self.comp + ((self.sum - t) + x);
        } else {
            self.comp = self.comp + ((x - t) + self.sum);
        }
        self.sum = t;
    }

    pub fn value(&self) -> T {
        self.sum + self.comp
    }
}

impl<T: Float> FromIterator<T> for CompensatedSum<T> {
    fn from_iter<I: IntoIterator<Item = T>>(iter: I) -> Self {
        let mut acc = Self::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

/// Lossy conversion of an exact rational to a float.
pub fn rational_to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let mut acc = CompensatedSum::new();
        acc.add(1.0e16_f64);
        for _ in 0..10 {
            acc.add(1.0);
        }
        acc.add(-1.0e16);
        assert_eq!(acc.value(), 10.0);
    }

    #[test]
    fn ratio_scalars_agree() {
        let q = BigRational::from_ratio(7, 3);
        assert_eq!(rational_to_f64(&q), f64::from_ratio(7, 3));
        assert_eq!(f32::from_count(5), 5.0);
    }
}
