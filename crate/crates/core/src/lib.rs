//! Cycle counts of Ewens-random permutations, Touchard polynomials, the
//! fixed-set statistic `E_m`, and counts of `m`-covers of multisets.
//!
//! Finite-`n` identities are evaluated in exact rational arithmetic; limit
//! laws are evaluated by truncated series with certified tails or estimated
//! by Monte Carlo. Kernels are generic over the scalar: [`Scalar`] covers
//! exact rationals and floats, [`Real`] the floating-point paths. The aliases
//! below fix the common instantiations.

pub mod covers;
pub mod error;
pub mod ewens;
pub mod exactcomb;
pub mod limitdist;
mod partitions;
pub mod perm;
pub mod poly;
pub mod scalar;

pub use error::{Error, Result};
pub use partitions::for_each_bounded_partition;
pub use poly::Polynomial;
pub use scalar::{CompensatedSum, Real, Scalar};

/// Arbitrary-precision nonnegative integer.
pub type BigNat = num_bigint::BigUint;
/// Exact rational in lowest terms with positive denominator.
pub type BigRational = num_rational::BigRational;

pub type RationalPolynomial = Polynomial<BigRational>;
pub type SeriesValue = exactcomb::SeriesValue<f64>;
pub type TruncatedDistribution = limitdist::TruncatedDistribution<f64>;
pub type EgfValue = limitdist::EgfValue<f64>;
pub type Interval = limitdist::Interval<f64>;
