//! Bell numbers, Stirling numbers, factorials, Touchard polynomials and the
//! Dobiński series.
//!
//! Everything here except [`dobinski`] is exact. Bell and Stirling tables are
//! memoized in process-wide tables guarded by mutexes and grown on demand, so
//! concurrent callers observe the same values as sequential ones.

use std::sync::{LazyLock, Mutex};

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::error::{domain, resource, Result};
use crate::poly::Polynomial;
use crate::scalar::{CompensatedSum, Real, Scalar};

static BELL: LazyLock<Mutex<Vec<BigUint>>> = LazyLock::new(|| Mutex::new(vec![BigUint::one()]));
static STIRLING2: LazyLock<Mutex<Vec<Vec<BigUint>>>> =
    LazyLock::new(|| Mutex::new(vec![vec![BigUint::one()]]));
static STIRLING1: LazyLock<Mutex<Vec<Vec<BigUint>>>> =
    LazyLock::new(|| Mutex::new(vec![vec![BigUint::one()]]));

pub fn factorial(n: usize) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, i| acc * BigUint::from(i))
}

/// Binomial coefficient `C(n, k)`, zero when `k > n`.
pub fn binomial(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= BigUint::from(n - i);
        acc /= BigUint::from(i + 1);
    }
    acc
}

/// Bell number `B_n` via `B_{n+1} = sum_k C(n,k) B_k`.
pub fn bell(n: usize) -> BigUint {
    let mut table = BELL.lock().expect("bell table poisoned");
    while table.len() <= n {
        let m = table.len() - 1;
        // walk row m of Pascal's triangle alongside the table
        let mut c = BigUint::one();
        let mut next = BigUint::zero();
        for (k, b) in table.iter().enumerate() {
            next += &c * b;
            c = c * BigUint::from(m - k) / BigUint::from(k + 1);
        }
        table.push(next);
    }
    table[n].clone()
}

fn grow_rows(
    table: &mut Vec<Vec<BigUint>>,
    n: usize,
    step: impl Fn(usize, &[BigUint], usize) -> BigUint,
) {
    while table.len() <= n {
        let prev_n = table.len() - 1;
        let prev = &table[prev_n];
        let row: Vec<BigUint> = (0..=prev_n + 1).map(|k| step(prev_n, prev, k)).collect();
        table.push(row);
    }
}

/// Stirling number of the second kind, `{n k}`.
pub fn stirling2(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let mut table = STIRLING2.lock().expect("stirling2 table poisoned");
    // {n+1 k} = k {n k} + {n k-1}
    grow_rows(&mut table, n, |_, prev, k| {
        let same = prev.get(k).map(|v| v * BigUint::from(k)).unwrap_or_default();
        let lower = if k > 0 { prev.get(k - 1).cloned().unwrap_or_default() } else { BigUint::zero() };
        same + lower
    });
    table[n][k].clone()
}

/// Unsigned Stirling number of the first kind: permutations of `[n]` with `k` cycles.
pub fn stirling1_unsigned(n: usize, k: usize) -> Result<BigUint> {
    if k < 1 || k > n {
        return domain(format!("stirling1_unsigned needs 1 <= k <= n, got n={n}, k={k}"));
    }
    let mut table = STIRLING1.lock().expect("stirling1 table poisoned");
    // s(n+1,k) = n s(n,k) + s(n,k-1)
    grow_rows(&mut table, n, |n, prev, k| {
        let same = prev.get(k).map(|v| v * BigUint::from(n)).unwrap_or_default();
        let lower = if k > 0 { prev.get(k - 1).cloned().unwrap_or_default() } else { BigUint::zero() };
        same + lower
    });
    Ok(table[n][k].clone())
}

/// `x (x-1) ... (x-j+1)`, with the empty product for `j = 0`.
pub fn falling_factorial<T: Scalar>(x: &T, j: usize) -> T {
    (0..j).fold(T::one(), |acc, i| acc * (x.clone() - T::from_count(i)))
}

/// `x (x+1) ... (x+n-1)`.
pub fn rising_factorial<T: Scalar>(x: &T, n: usize) -> T {
    (0..n).fold(T::one(), |acc, i| acc * (x.clone() + T::from_count(i)))
}

/// The rising factorial `θ^{(n)}` as a polynomial in `θ`, built by expanding
/// the product. Its coefficients are the unsigned Stirling numbers of the
/// first kind.
pub fn rising_factorial_poly<T: Scalar>(n: usize) -> Polynomial<T> {
    (0..n).fold(Polynomial::one(), |acc, i| {
        &acc * &Polynomial::new(vec![T::from_count(i), T::one()])
    })
}

/// Touchard polynomial `T_k(x) = sum_j {k j} x^j`.
pub fn touchard<T: Scalar>(k: usize) -> Polynomial<T> {
    Polynomial::new((0..=k).map(|j| T::from_biguint(&stirling2(k, j))).collect())
}

/// Truncated evaluation of a positive series together with a certified bound
/// on the discarded tail.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesValue<T> {
    pub value: T,
    pub truncation_bound: T,
    pub terms: usize,
}

const DOBINSKI_MAX_TERMS: usize = 1_000_000;

/// `T_n(x) = e^{-x} sum_{k>=0} k^n x^k / k!`, truncated.
///
/// Summation stops at the first `K >= max(3n, 2*ceil(x) + 10)` where the
/// terms have decreased for five consecutive steps, the last term is below
/// `rel_tol` times the partial sum, and the geometric tail bound
/// `t_{K+1} / (1 - t_{K+1}/t_K)` is below the same threshold. The term ratio
/// `x/(k+1) * ((k+1)/k)^n` is decreasing in `k`, which makes the tail bound
/// valid once the ratio drops below one.
// negated comparisons so that NaN arguments are rejected too
#[allow(clippy::neg_cmp_op_on_partial_ord)]
pub fn dobinski<T: Real>(n: u32, x: T, rel_tol: T) -> Result<SeriesValue<T>> {
    if !(rel_tol > T::zero()) {
        return domain("dobinski: rel_tol must be positive");
    }
    if !(x > T::zero()) || !x.is_finite() {
        return domain("dobinski: x must be positive and finite");
    }
    let min_k = (3 * n as usize).max(2 * x.ceil().to_usize().unwrap_or(usize::MAX / 4) + 10);

    let mut sum = CompensatedSum::new();
    let mut term = if n == 0 { T::one() } else { T::zero() };
    sum.add(term);
    let mut prev = term;
    let mut decreasing = 0usize;
    let mut k = 0usize;
    loop {
        k += 1;
        if k > DOBINSKI_MAX_TERMS {
            return resource("dobinski: series did not meet its stopping rule");
        }
        let kt = T::from_count(k);
        term = if k == 1 {
            x
        } else {
            let growth = (kt / T::from_count(k - 1)).powi(n as i32);
            prev * x / kt * growth
        };
        sum.add(term);
        if term < prev {
            decreasing += 1;
        } else {
            decreasing = 0;
        }
        prev = term;

        let partial = sum.value();
        let threshold = rel_tol * partial;
        if k >= min_k && decreasing >= 5 && term < threshold {
            let k1 = T::from_count(k + 1);
            let next = term * x / k1 * (k1 / kt).powi(n as i32);
            let ratio = next / term;
            if ratio < T::one() || term.is_zero() {
                let tail = if term.is_zero() { T::zero() } else { next / (T::one() - ratio) };
                if tail < threshold {
                    let scale = (-x).exp();
                    return Ok(SeriesValue {
                        value: scale * partial,
                        truncation_bound: scale * tail,
                        terms: k + 1,
                    });
                }
            }
        }
    }
}
