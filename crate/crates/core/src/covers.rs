//! Counting `m`-covers of `[k]` and the coefficient functional `γ_m(u)`.
//!
//! An `m`-cover of `[k]` is a multiset of nonempty subsets of `[k]` in which
//! every element lies in exactly `m` of the subsets. Recording how often each
//! subset `I` occurs gives multiplicities `l_I >= 0` with
//! `sum_{I ∋ i} l_I = m` for every `i`, and this is a bijection, so counting
//! covers is counting those integer solutions.

use std::collections::HashMap;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{domain, resource, Result};
use crate::exactcomb::binomial;
use crate::partitions::for_each_bounded_partition;
use crate::poly::Polynomial;

pub const MAX_COVER_K: usize = 12;

/// Default cap on the residual-demand state space `(m+1)^k`.
pub const DEFAULT_STATE_BUDGET: u64 = 100_000_000;

/// `v_{k;m}` together with its indices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverCount {
    pub k: usize,
    pub m: usize,
    pub value: BigUint,
}

/// Outcome `(u_1, ..., u_m)` of the independent Poisson cycle counts.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct UVector(pub Vec<usize>);

impl UVector {
    pub fn zeros(m: usize) -> Self {
        Self(vec![0; m])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `u_j` for `j` in `1..=m`.
    pub fn get(&self, j: usize) -> usize {
        self.0[j - 1]
    }
}

impl From<Vec<usize>> for UVector {
    fn from(v: Vec<usize>) -> Self {
        Self(v)
    }
}

fn check_km(k: usize, m: usize) -> Result<()> {
    if k == 0 || m == 0 {
        return domain(format!("cover counts need k, m >= 1, got k={k}, m={m}"));
    }
    Ok(())
}

/// `v_{k;m}` with the default state budget.
pub fn count_covers(k: usize, m: usize) -> Result<CoverCount> {
    count_covers_with_budget(k, m, DEFAULT_STATE_BUDGET)
}

/// `v_{k;m}` by dynamic programming over the nonempty subsets of `[k]`.
///
/// The state is the residual demand `(r_1, ..., r_k)`, each `r_i` in `0..=m`,
/// packed base `m + 1`. Subset `I` may be used `l` times for any
/// `l <= min_{i ∈ I} r_i`; we count paths ending at the zero vector.
/// Subsets are processed grouped by their smallest element, and once the group
/// with smallest element `i` is done no later subset contains `i`, so states
/// with `r_i > 0` are dropped there.
pub fn count_covers_with_budget(k: usize, m: usize, budget: u64) -> Result<CoverCount> {
    check_km(k, m)?;
    if k > MAX_COVER_K {
        return resource(format!("count_covers supports k <= {MAX_COVER_K}, got {k}"));
    }
    let states = (m as u128 + 1).checked_pow(k as u32);
    if states.is_none_or(|s| s > budget as u128) {
        return resource(format!(
            "(m+1)^k = {}^{k} residual states exceed the budget of {budget}",
            m + 1
        ));
    }
    let base = m as u64 + 1;
    let place: Vec<u64> = (0..k).map(|i| base.pow(i as u32)).collect();
    let digit = |code: u64, i: usize| (code / place[i]) % base;

    let mut subsets: Vec<u32> = (1..(1u32 << k)).collect();
    subsets.sort_by_key(|&s| (s.trailing_zeros(), s));

    let start: u64 = place.iter().map(|p| p * m as u64).sum();
    let mut layer: HashMap<u64, BigUint> = HashMap::from([(start, BigUint::one())]);

    for (idx, &mask) in subsets.iter().enumerate() {
        let members: Vec<usize> = (0..k).filter(|&i| mask >> i & 1 == 1).collect();
        let stride: u64 = members.iter().map(|&i| place[i]).sum();
        let mut next: HashMap<u64, BigUint> = HashMap::with_capacity(layer.len());
        for (code, ways) in layer {
            let cap = members.iter().map(|&i| digit(code, i)).min().unwrap_or(0);
            for l in 0..=cap {
                *next.entry(code - l * stride).or_default() += &ways;
            }
        }
        let low = mask.trailing_zeros() as usize;
        let group_done = subsets
            .get(idx + 1)
            .is_none_or(|s| s.trailing_zeros() as usize != low);
        if group_done {
            next.retain(|&code, _| digit(code, low) == 0);
        }
        layer = next;
    }
    let value = layer.remove(&0).unwrap_or_default();
    Ok(CoverCount { k, m, value })
}

/// `v_{k;m}` by listing every multiset of nonempty subsets of `[k]` with
/// between `m` and `km` members and checking the covering condition.
///
/// Independent of the DP; only usable for `k <= 3`, `m <= 5`.
pub fn count_covers_bruteforce(k: usize, m: usize) -> Result<CoverCount> {
    check_km(k, m)?;
    if k > 3 || m > 5 {
        return resource(format!(
            "brute-force cover enumeration supports k <= 3, m <= 5, got k={k}, m={m}"
        ));
    }
    let masks: Vec<u32> = (1..(1u32 << k)).collect();
    let mut total = 0u64;
    let mut chosen = Vec::new();
    for r in m..=k * m {
        multisets(&masks, 0, r, &mut chosen, &mut |ms| {
            let covers = (0..k).all(|i| ms.iter().filter(|&&s| s >> i & 1 == 1).count() == m);
            if covers {
                total += 1;
            }
        });
    }
    Ok(CoverCount {
        k,
        m,
        value: BigUint::from(total),
    })
}

fn multisets(items: &[u32], from: usize, size: usize, chosen: &mut Vec<u32>, f: &mut impl FnMut(&[u32])) {
    if chosen.len() == size {
        f(chosen);
        return;
    }
    for i in from..items.len() {
        chosen.push(items[i]);
        multisets(items, i, size, chosen, f);
        chosen.pop();
    }
}

fn check_u(m: usize, u: &UVector) -> Result<()> {
    if m == 0 {
        return domain("gamma needs m >= 1");
    }
    if u.len() != m {
        return domain(format!("u has length {}, expected m = {m}", u.len()));
    }
    Ok(())
}

/// `γ_m(u) = [z^m] prod_{j=1}^m (1 + z^j)^{u_j}`, by truncated polynomial
/// multiplication.
pub fn gamma(m: usize, u: &UVector) -> Result<BigUint> {
    check_u(m, u)?;
    let mut acc: Polynomial<BigUint> = Polynomial::one();
    for j in 1..=m {
        let factor = &Polynomial::one() + &Polynomial::monomial(BigUint::one(), j);
        for _ in 0..u.get(j) {
            acc = acc.mul_truncated(&factor, m);
        }
    }
    Ok(acc.coeff(m))
}

/// `sum prod_j C(u_j, l_j)` over `(l_1, ..., l_m)` with `sum_j j l_j = m`
/// and `l_j <= u_j`; equal to [`gamma`] by the binomial theorem.
pub fn gamma_binomial_sum(m: usize, u: &UVector) -> Result<BigUint> {
    check_u(m, u)?;
    let mut total = BigUint::zero();
    for_each_bounded_partition(
        m,
        |j| u.get(j),
        |l| {
            total += l
                .iter()
                .enumerate()
                .map(|(j, &lj)| binomial(u.get(j + 1), lj))
                .product::<BigUint>();
        },
    );
    Ok(total)
}
