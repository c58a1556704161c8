//! Dense univariate polynomials.

use std::fmt;
use std::ops::{Add, Mul};

use num_traits::{One, Zero};

/// Dense polynomial with coefficient `i` attached to `x^i`.
///
/// Trailing zeros are always trimmed, so the zero polynomial has no stored
/// coefficients and reports degree `-1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Polynomial<T> {
    coeffs: Vec<T>,
}

impl<T: Clone + Zero> Polynomial<T> {
    pub fn new(mut coeffs: Vec<T>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    /// `c * x^d`
    pub fn monomial(c: T, d: usize) -> Self {
        let mut coeffs = vec![T::zero(); d + 1];
        coeffs[d] = c;
        Self::new(coeffs)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, with `-1` for the zero polynomial.
    pub fn degree(&self) -> isize {
        self.coeffs.len() as isize - 1
    }

    pub fn coeff(&self, i: usize) -> T {
        self.coeffs.get(i).cloned().unwrap_or_else(T::zero)
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<T> {
        self.coeffs
    }

    pub fn map<U: Clone + Zero>(&self, f: impl Fn(&T) -> U) -> Polynomial<U> {
        Polynomial::new(self.coeffs.iter().map(f).collect())
    }
}

impl<T> Polynomial<T>
where
    T: Clone + Zero + One + Mul<Output = T> + Add<Output = T>,
{
    pub fn one() -> Self {
        Self::new(vec![T::one()])
    }

    /// Horner evaluation.
    pub fn eval(&self, x: &T) -> T {
        self.coeffs
            .iter()
            .rev()
            .fold(T::zero(), |acc, c| acc * x.clone() + c.clone())
    }

    /// Product truncated to degree `max_degree`.
    pub fn mul_truncated(&self, other: &Self, max_degree: usize) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let len = (self.coeffs.len() + other.coeffs.len() - 1).min(max_degree + 1);
        let mut out = vec![T::zero(); len];
        for (i, a) in self.coeffs.iter().enumerate().take(len) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate().take(len - i) {
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        Self::new(out)
    }

    pub fn truncate(&self, max_degree: usize) -> Self {
        Self::new(self.coeffs.iter().take(max_degree + 1).cloned().collect())
    }
}

impl<T> Add for &Polynomial<T>
where
    T: Clone + Zero + Add<Output = T>,
{
    type Output = Polynomial<T>;

    fn add(self, rhs: Self) -> Polynomial<T> {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..len).map(|i| self.coeff(i) + rhs.coeff(i)).collect();
        Polynomial::new(coeffs)
    }
}

impl<T> Mul for &Polynomial<T>
where
    T: Clone + Zero + One + Mul<Output = T> + Add<Output = T>,
{
    type Output = Polynomial<T>;

    #[allow(clippy::suspicious_arithmetic_impl)]
    fn mul(self, rhs: Self) -> Polynomial<T> {
        let deg = (self.coeffs.len() + rhs.coeffs.len()).saturating_sub(2);
        self.mul_truncated(rhs, deg)
    }
}

impl<T: fmt::Display + Zero + One + PartialEq> fmt::Display for Polynomial<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{c}")?,
                _ if c.is_one() => {}
                _ => write!(f, "{c}*")?,
            }
            match i {
                0 => {}
                1 => write!(f, "x")?,
                _ => write!(f, "x^{i}")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn zero_polynomial_has_sentinel_degree() {
        let p: Polynomial<i64> = Polynomial::new(vec![0, 0, 0]);
        assert!(p.is_zero());
        assert_eq!(p.degree(), -1);
        assert_eq!(Polynomial::<i64>::one().degree(), 0);
    }

    #[test]
    fn trailing_zeros_are_trimmed() {
        let p = Polynomial::new(vec![1, 2, 0, 0]);
        assert_eq!(p.degree(), 1);
        assert_eq!(p.coeff(7), 0);
    }

    #[test]
    fn exact_rational_evaluation() {
        // 1/2 + x^2 at x = 2/3
        let p = Polynomial::new(vec![q(1, 2), q(0, 1), q(1, 1)]);
        assert_eq!(p.eval(&q(2, 3)), q(17, 18));
    }

    #[test]
    fn product_and_truncation() {
        // (1 + x)^2 = 1 + 2x + x^2
        let a = Polynomial::new(vec![1i64, 1]);
        assert_eq!((&a * &a).coeffs(), &[1, 2, 1]);
        assert_eq!(a.mul_truncated(&a, 1).coeffs(), &[1, 2]);
        assert_eq!((&a + &Polynomial::monomial(-1, 1)).coeffs(), &[1]);
        assert!((&a * &Polynomial::zero()).is_zero());
    }

    #[test]
    fn display_is_readable() {
        let p = Polynomial::new(vec![0i64, 1, 3, 1]);
        assert_eq!(p.to_string(), "x + 3*x^2 + x^3");
    }
}
