//! Permutations of `[n]`, cycle statistics, the fixed-set count `E_m`, and
//! exact finite-`n` moments under the uniform and Ewens measures.
//!
//! All public indexing is 1-based: a permutation of `[n]` maps `{1, ..., n}`
//! onto itself, serializes as the JSON array of its images, and prints in
//! cycle notation such as `(3 7 9)(2 4)(1 6)(5)(8)`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Pow, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{domain, resource, Error, Result};
use crate::exactcomb::{binomial, factorial, rising_factorial, stirling2};
use crate::partitions::for_each_bounded_partition;
use crate::scalar::Scalar;

/// Largest `n` for which `S_n` may be enumerated (10! = 3,628,800).
pub const MAX_ENUMERATION_N: usize = 10;

/// Default cap on the number of `m`-subsets the direct fixed-set count may visit.
pub const DEFAULT_SUBSET_BUDGET: u64 = 10_000_000;

/// A permutation of `[n]` in one-line notation.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Permutation {
    // 0-based images
    images: Vec<usize>,
}

impl Permutation {
    /// Builds a permutation from its 1-based images `σ(1), ..., σ(n)`.
    pub fn from_images(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        if n == 0 {
            return domain("a permutation needs n >= 1");
        }
        let mut seen = vec![false; n];
        let mut zero_based = Vec::with_capacity(n);
        for &v in &images {
            if v == 0 || v > n || seen[v - 1] {
                return domain(format!("{images:?} is not a bijection of [1..{n}]"));
            }
            seen[v - 1] = true;
            zero_based.push(v - 1);
        }
        Ok(Self { images: zero_based })
    }

    pub(crate) fn from_zero_based_unchecked(images: Vec<usize>) -> Self {
        debug_assert!(!images.is_empty());
        Self { images }
    }

    pub fn identity(n: usize) -> Self {
        assert!(n >= 1, "a permutation needs n >= 1");
        Self {
            images: (0..n).collect(),
        }
    }

    /// Builds a permutation of `[n]` from disjoint 1-based cycles. Elements
    /// not mentioned are fixed points.
    pub fn from_cycles(n: usize, cycles: &[Vec<usize>]) -> Result<Self> {
        if n == 0 {
            return domain("a permutation needs n >= 1");
        }
        let mut images: Vec<usize> = (0..n).collect();
        let mut seen = vec![false; n];
        for cycle in cycles {
            for &v in cycle {
                if v == 0 || v > n {
                    return domain(format!("element {v} is outside [1..{n}]"));
                }
                if seen[v - 1] {
                    return domain(format!("element {v} appears twice"));
                }
                seen[v - 1] = true;
            }
            for (i, &v) in cycle.iter().enumerate() {
                images[v - 1] = cycle[(i + 1) % cycle.len()] - 1;
            }
        }
        Ok(Self { images })
    }

    /// Parses cycle notation like `"(3 7 9)(2 4)(1 6)(5)(8)"`. Elements may be
    /// separated by whitespace or commas.
    ///
    /// With `n = Some(n)`, unlisted elements of `[n]` are fixed points. With
    /// `n = None`, the listed elements must be exactly `{1, ..., N}` for some `N`.
    pub fn parse_cycles(s: &str, n: Option<usize>) -> Result<Self> {
        let mut cycles = Vec::new();
        let mut rest = s.trim();
        while !rest.is_empty() {
            let open = rest
                .strip_prefix('(')
                .ok_or_else(|| Error::Parse(format!("expected '(' at {rest:?}")))?;
            let close = open
                .find(')')
                .ok_or_else(|| Error::Parse(format!("unclosed cycle in {s:?}")))?;
            let body = &open[..close];
            let cycle = body
                .split(|c: char| c.is_whitespace() || c == ',')
                .filter(|t| !t.is_empty())
                .map(|t| {
                    t.parse::<usize>()
                        .map_err(|_| Error::Parse(format!("bad element {t:?} in {s:?}")))
                })
                .collect::<Result<Vec<_>>>()?;
            if cycle.is_empty() {
                return Err(Error::Parse(format!("empty cycle in {s:?}")));
            }
            cycles.push(cycle);
            rest = open[close + 1..].trim_start();
        }
        let listed: usize = cycles.iter().map(Vec::len).sum();
        let n = match n {
            Some(n) => n,
            None => {
                let max = cycles.iter().flatten().copied().max().unwrap_or(0);
                if max != listed {
                    return domain(format!(
                        "cycle string {s:?} must list every element of [1..{max}] when n is not given"
                    ));
                }
                max
            }
        };
        Self::from_cycles(n, &cycles)
    }

    pub fn n(&self) -> usize {
        self.images.len()
    }

    /// `σ(i)` for `i` in `1..=n`.
    pub fn apply(&self, i: usize) -> usize {
        self.images[i - 1] + 1
    }

    pub fn images(&self) -> Vec<usize> {
        self.images.iter().map(|v| v + 1).collect()
    }

    /// Disjoint cycles, each starting at its smallest element, ordered by
    /// that element.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let n = self.n();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut cycle = Vec::new();
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                cycle.push(i + 1);
                i = self.images[i];
            }
            out.push(cycle);
        }
        out
    }

    pub fn num_cycles(&self) -> usize {
        self.cycle_type().num_cycles()
    }

    pub fn cycle_type(&self) -> CycleType {
        cycle_type(self)
    }

    /// Whether `σ(A) = A`; `set` holds 1-based elements.
    pub fn fixes(&self, set: &[usize]) -> bool {
        let mut member = vec![false; self.n()];
        for &v in set {
            member[v - 1] = true;
        }
        set.iter().all(|&v| member[self.images[v - 1]])
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Permutation{:?}", self.images())
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for cycle in self.cycles() {
            write!(f, "(")?;
            for (i, v) in cycle.iter().enumerate() {
                if i > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{v}")?;
            }
            write!(f, ")")?;
        }
        Ok(())
    }
}

impl TryFrom<Vec<usize>> for Permutation {
    type Error = Error;

    fn try_from(images: Vec<usize>) -> Result<Self> {
        Self::from_images(images)
    }
}

impl From<Permutation> for Vec<usize> {
    fn from(p: Permutation) -> Self {
        p.images()
    }
}

/// Multiset of cycle lengths: `counts[j - 1]` is the number of `j`-cycles.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CycleType {
    counts: Vec<usize>,
}

impl CycleType {
    /// `counts[j - 1] = c_j`; requires `sum_j j c_j = counts.len() >= 1`.
    pub fn from_counts(counts: Vec<usize>) -> Result<Self> {
        let n = counts.len();
        let total: usize = counts.iter().enumerate().map(|(i, c)| (i + 1) * c).sum();
        if n == 0 || total != n {
            return domain(format!("cycle counts {counts:?} do not describe a permutation of [{n}]"));
        }
        Ok(Self { counts })
    }

    pub fn n(&self) -> usize {
        self.counts.len()
    }

    /// `C_m`, the number of `m`-cycles (zero for `m = 0` or `m > n`).
    pub fn count(&self, m: usize) -> usize {
        if m == 0 {
            return 0;
        }
        self.counts.get(m - 1).copied().unwrap_or(0)
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn num_cycles(&self) -> usize {
        self.counts.iter().sum()
    }
}

pub fn cycle_type(p: &Permutation) -> CycleType {
    let n = p.n();
    let mut counts = vec![0usize; n];
    let mut seen = vec![false; n];
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let mut i = start;
        while !seen[i] {
            seen[i] = true;
            len += 1;
            i = p.images[i];
        }
        counts[len - 1] += 1;
    }
    CycleType { counts }
}

/// Number of `m`-subsets `A` of `[n]` with `σ(A) = A`, by visiting every subset.
///
/// Fails with a resource error when `C(n, m)` exceeds `budget`; the
/// cycle-type formula [`fixed_set_count`] has no such limit.
pub fn fixed_set_count_direct(p: &Permutation, m: usize, budget: u64) -> Result<BigUint> {
    let n = p.n();
    if m == 0 || m > n {
        return domain(format!("fixed_set_count_direct needs 1 <= m <= n, got m={m}, n={n}"));
    }
    if binomial(n, m) > BigUint::from(budget) {
        return resource(format!(
            "C({n},{m}) subsets exceed the budget of {budget}; use the cycle-type formula"
        ));
    }
    let mut member = vec![false; n];
    let mut idx: Vec<usize> = (0..m).collect();
    let mut count = 0u64;
    loop {
        for &i in &idx {
            member[i] = true;
        }
        if idx.iter().all(|&i| member[p.images[i]]) {
            count += 1;
        }
        for &i in &idx {
            member[i] = false;
        }
        // next combination in lexicographic order
        let Some(pos) = (0..m).rev().find(|&i| idx[i] != i + n - m) else {
            break;
        };
        idx[pos] += 1;
        for j in pos + 1..m {
            idx[j] = idx[j - 1] + 1;
        }
    }
    Ok(BigUint::from(count))
}

/// `E_m` from the cycle type: the sum over `(l_1, ..., l_m)` with
/// `sum_j j l_j = m` and `l_j <= c_j` of `prod_j C(c_j, l_j)`.
///
/// An invariant set is a union of whole cycles, so choosing `l_j` of the
/// `c_j` cycles of each length enumerates them. Returns zero for `m > n`.
pub fn fixed_set_count(ct: &CycleType, m: usize) -> BigUint {
    let mut total = BigUint::zero();
    for_each_bounded_partition(
        m,
        |j| ct.count(j),
        |l| {
            total += l
                .iter()
                .enumerate()
                .filter(|(_, &lj)| lj > 0)
                .map(|(j, &lj)| binomial(ct.count(j + 1), lj))
                .product::<BigUint>();
        },
    );
    total
}

/// Lexicographic enumeration of `S_n`.
#[derive(Debug, Clone)]
pub struct SymmetricGroupIter {
    next: Option<Vec<usize>>,
}

impl Iterator for SymmetricGroupIter {
    type Item = Permutation;

    fn next(&mut self) -> Option<Permutation> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        // standard next-permutation step
        if let Some(i) = (0..succ.len().saturating_sub(1)).rev().find(|&i| succ[i] < succ[i + 1]) {
            let j = (i + 1..succ.len()).rev().find(|&j| succ[j] > succ[i]).unwrap();
            succ.swap(i, j);
            succ[i + 1..].reverse();
            self.next = Some(succ);
        }
        Some(Permutation::from_zero_based_unchecked(current))
    }
}

/// All `n!` permutations of `[n]` in lexicographic order of one-line notation.
pub fn enumerate_sn(n: usize) -> Result<SymmetricGroupIter> {
    if n == 0 {
        return domain("enumerate_sn needs n >= 1");
    }
    if n > MAX_ENUMERATION_N {
        return resource(format!(
            "enumerating S_{n} exceeds the cap n <= {MAX_ENUMERATION_N}; use Monte Carlo"
        ));
    }
    Ok(SymmetricGroupIter {
        next: Some((0..n).collect()),
    })
}

fn check_theta<T: Scalar>(theta: &T) -> Result<()> {
    if *theta > T::zero() {
        Ok(())
    } else {
        domain(format!("theta must be positive, got {theta:?}"))
    }
}

/// Ewens probability `θ^{N(σ)} / θ^{(n)}` of a single permutation.
pub fn ewens_weight<T: Scalar>(p: &Permutation, theta: &T) -> Result<T> {
    check_theta(theta)?;
    Ok(ewens_class_weight(p.n(), p.num_cycles(), theta))
}

fn ewens_class_weight<T: Scalar>(n: usize, cycles: usize, theta: &T) -> T {
    pow(theta, cycles) / rising_factorial(theta, n)
}

fn pow<T: Scalar>(x: &T, e: usize) -> T {
    (0..e).fold(T::one(), |acc, _| acc * x.clone())
}

/// The cycle types of `S_n` with their multiplicities, collected by walking
/// the full enumeration once.
///
/// Every statistic handled here depends on a permutation only through its
/// cycle type, so exact moments are weighted sums over this table.
#[derive(Debug, Clone)]
pub struct SymmetricGroupTally {
    n: usize,
    classes: Vec<(CycleType, u64)>,
}

impl SymmetricGroupTally {
    pub fn new(n: usize) -> Result<Self> {
        let mut classes: BTreeMap<CycleType, u64> = BTreeMap::new();
        for p in enumerate_sn(n)? {
            *classes.entry(cycle_type(&p)).or_default() += 1;
        }
        Ok(Self {
            n,
            classes: classes.into_iter().collect(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn classes(&self) -> &[(CycleType, u64)] {
        &self.classes
    }

    /// Number of permutations with exactly `k` cycles, for `k = 0..=n`.
    pub fn by_cycle_count(&self) -> Vec<u64> {
        let mut out = vec![0u64; self.n + 1];
        for (ct, c) in &self.classes {
            out[ct.num_cycles()] += c;
        }
        out
    }

    /// `E_{n;θ} prod_i C_{m_i}^{k_i}`.
    pub fn cycle_moment<T: Scalar>(&self, theta: &T, specs: &[(usize, u32)]) -> Result<T> {
        check_theta(theta)?;
        check_specs(self.n, specs)?;
        let mut acc = T::zero();
        for (ct, count) in &self.classes {
            let stat: BigUint = specs
                .iter()
                .map(|&(m, k)| BigUint::from(ct.count(m)).pow(k))
                .product();
            if stat.is_zero() {
                continue;
            }
            let weight = ewens_class_weight(self.n, ct.num_cycles(), theta);
            acc = acc + T::from_biguint(&(stat * BigUint::from(*count))) * weight;
        }
        Ok(acc)
    }

    /// `E_n (E_m)^k` under the uniform measure.
    pub fn fixed_set_moment(&self, m: usize, k: u32) -> Result<BigRational> {
        if m == 0 || m > self.n {
            return domain(format!("fixed-set moment needs 1 <= m <= n, got m={m}, n={}", self.n));
        }
        let total: BigUint = self
            .classes
            .iter()
            .map(|(ct, c)| fixed_set_count(ct, m).pow(k) * BigUint::from(*c))
            .sum();
        Ok(BigRational::new(
            BigInt::from(total),
            BigInt::from(factorial(self.n)),
        ))
    }
}

fn check_specs(n: usize, specs: &[(usize, u32)]) -> Result<()> {
    for &(m, k) in specs {
        if m == 0 || m > n || k == 0 {
            return domain(format!("moment spec (m={m}, k={k}) needs 1 <= m <= n={n} and k >= 1"));
        }
    }
    Ok(())
}

/// Exact `E_{n;θ} prod_i C_{m_i}^{k_i}` by weighted enumeration of `S_n`.
pub fn exact_cycle_moment<T: Scalar>(n: usize, theta: &T, specs: &[(usize, u32)]) -> Result<T> {
    SymmetricGroupTally::new(n)?.cycle_moment(theta, specs)
}

/// Exact `E_{n;θ} C_m^k` from the indicator decomposition, valid for `n >= mk`:
///
/// `sum_{l=1}^k {k l} n!/((m!)^l (n-lm)!) ((m-1)!)^l θ^l θ^{(n-lm)} / θ^{(n)}`.
///
/// Each term counts ordered tuples of `k` cycle supports that collapse onto
/// `l` disjoint `m`-sets, times the probability that all `l` sets are cycles.
pub fn closed_cycle_moment<T: Scalar>(n: usize, theta: &T, m: usize, k: usize) -> Result<T> {
    check_theta(theta)?;
    if m == 0 || k == 0 {
        return domain("closed_cycle_moment needs m >= 1 and k >= 1");
    }
    if n < m * k {
        return domain(format!(
            "closed_cycle_moment needs n >= m*k, got n={n}, m={m}, k={k}"
        ));
    }
    let m_fact = factorial(m);
    let cycle_arrangements = factorial(m - 1);
    let norm = rising_factorial(theta, n);
    let mut acc = T::zero();
    for l in 1..=k {
        let rest = n - l * m;
        let supports = factorial(n) / (m_fact.clone().pow(l as u32) * factorial(rest));
        let count = stirling2(k, l) * supports * cycle_arrangements.clone().pow(l as u32);
        acc = acc
            + T::from_biguint(&count) * pow(theta, l) * rising_factorial(theta, rest)
                / norm.clone();
    }
    Ok(acc)
}

/// Exact `E_n (E_m)^k` under the uniform measure, by enumeration of `S_n`.
pub fn exact_fixed_set_moment(n: usize, m: usize, k: u32) -> Result<BigRational> {
    SymmetricGroupTally::new(n)?.fixed_set_moment(m, k)
}

/// `1/n!` as an exact rational; the uniform weight on `S_n`.
pub fn uniform_weight(n: usize) -> BigRational {
    BigRational::new(BigInt::one(), BigInt::from(factorial(n)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactcomb::touchard;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn nine_element_example() -> Permutation {
        Permutation::parse_cycles("(3 7 9)(2 4)(1 6)(5)(8)", None).unwrap()
    }

    #[test]
    fn construction_validates_bijection() {
        assert!(Permutation::from_images(vec![2, 1, 3]).is_ok());
        assert!(Permutation::from_images(vec![2, 2, 3]).is_err());
        assert!(Permutation::from_images(vec![0, 1]).is_err());
        assert!(Permutation::from_images(vec![]).is_err());
    }

    #[test]
    fn cycle_types() {
        assert_eq!(cycle_type(&Permutation::identity(4)).counts(), &[4, 0, 0, 0]);
        let ct = cycle_type(&nine_element_example());
        assert_eq!(&ct.counts()[..4], &[2, 2, 1, 0]);
        assert_eq!(ct.num_cycles(), 5);
        let five_cycle = Permutation::from_images(vec![2, 3, 4, 5, 1]).unwrap();
        assert_eq!(cycle_type(&five_cycle).counts(), &[0, 0, 0, 0, 1]);
        assert!(CycleType::from_counts(vec![2, 1, 0]).is_err());
    }

    #[test]
    fn parse_cycle_notation() {
        let p = nine_element_example();
        assert_eq!(p.n(), 9);
        assert_eq!(p.apply(3), 7);
        assert_eq!(p.apply(9), 3);
        assert_eq!(p.apply(5), 5);
        assert_eq!(p.to_string(), "(1 6)(2 4)(3 7 9)(5)(8)");
        let q = Permutation::parse_cycles("(3,7,9)(2, 4)(1 6)", Some(9)).unwrap();
        assert_eq!(p, q);
        assert!(Permutation::parse_cycles("(3 7 9)(2 4)(1 6)", None).is_err());
        assert!(matches!(
            Permutation::parse_cycles("(1 2", None),
            Err(Error::Parse(_))
        ));
        assert!(Permutation::parse_cycles("(1 2)(2 3)", None).is_err());
        assert!(Permutation::parse_cycles("(1 5)", Some(3)).is_err());
    }

    #[test]
    fn json_is_one_based_images() {
        let p = Permutation::parse_cycles("(1 2 3)", None).unwrap();
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(s, "[2,3,1]");
        let back: Permutation = serde_json::from_str(&s).unwrap();
        assert_eq!(back, p);
        assert!(serde_json::from_str::<Permutation>("[1,1]").is_err());
    }

    #[test]
    fn nine_element_fixed_sets() {
        let p = nine_element_example();
        assert_eq!(
            fixed_set_count_direct(&p, 4, DEFAULT_SUBSET_BUDGET).unwrap(),
            BigUint::from(5u32)
        );
        assert_eq!(fixed_set_count(&cycle_type(&p), 4), BigUint::from(5u32));
        for set in [[3, 5, 7, 9], [3, 7, 8, 9], [1, 2, 4, 6], [2, 4, 5, 8], [1, 5, 6, 8]] {
            assert!(p.fixes(&set));
        }
        assert!(!p.fixes(&[1, 2, 3, 4]));
    }

    #[test]
    fn fixed_set_count_edge_cases() {
        let id = Permutation::identity(6);
        for m in 1..=6 {
            assert_eq!(fixed_set_count_direct(&id, m, DEFAULT_SUBSET_BUDGET).unwrap(), binomial(6, m));
            assert_eq!(fixed_set_count(&cycle_type(&id), m), binomial(6, m));
        }
        let five_cycle = Permutation::from_images(vec![2, 3, 4, 5, 1]).unwrap();
        assert!(fixed_set_count_direct(&five_cycle, 2, DEFAULT_SUBSET_BUDGET).unwrap().is_zero());
        let p = nine_element_example();
        assert_eq!(fixed_set_count(&cycle_type(&p), 1), BigUint::from(cycle_type(&p).count(1)));
        assert_eq!(fixed_set_count(&cycle_type(&Permutation::identity(4)), 2), BigUint::from(6u32));
    }

    #[test]
    fn fixed_set_count_direct_budget() {
        let id = Permutation::identity(30);
        assert!(matches!(
            fixed_set_count_direct(&id, 15, 1000),
            Err(Error::Resource(_))
        ));
        assert!(fixed_set_count_direct(&id, 0, 1000).is_err());
    }

    #[test]
    fn formula_matches_direct_count_on_small_groups() {
        for n in 1..=7 {
            for p in enumerate_sn(n).unwrap() {
                let ct = cycle_type(&p);
                for m in 1..=n {
                    let direct = fixed_set_count_direct(&p, m, DEFAULT_SUBSET_BUDGET).unwrap();
                    assert_eq!(fixed_set_count(&ct, m), direct, "{p} m={m}");
                    assert!(direct <= binomial(n, m));
                }
            }
        }
    }

    #[test]
    fn enumeration_order_and_size() {
        assert_eq!(enumerate_sn(1).unwrap().count(), 1);
        let s3: Vec<_> = enumerate_sn(3).unwrap().map(|p| p.images()).collect();
        assert_eq!(
            s3,
            vec![
                vec![1, 2, 3],
                vec![1, 3, 2],
                vec![2, 1, 3],
                vec![2, 3, 1],
                vec![3, 1, 2],
                vec![3, 2, 1]
            ]
        );
        let tally = SymmetricGroupTally::new(4).unwrap();
        assert_eq!(tally.by_cycle_count(), vec![0, 6, 11, 6, 1]);
        assert!(matches!(enumerate_sn(11), Err(Error::Resource(_))));
        assert!(enumerate_sn(0).is_err());
    }

    #[test]
    fn cycle_count_histogram_is_stirling1() {
        for n in 1..=8 {
            let hist = SymmetricGroupTally::new(n).unwrap().by_cycle_count();
            for k in 1..=n {
                let s = crate::exactcomb::stirling1_unsigned(n, k).unwrap();
                assert_eq!(BigUint::from(hist[k]), s, "n={n} k={k}");
            }
        }
    }

    #[test]
    fn ewens_weight_examples() {
        for p in enumerate_sn(4).unwrap() {
            assert_eq!(ewens_weight(&p, &q(1, 1)).unwrap(), q(1, 24));
        }
        let id = Permutation::identity(2);
        let swap = Permutation::from_images(vec![2, 1]).unwrap();
        assert_eq!(ewens_weight(&id, &q(2, 1)).unwrap(), q(2, 3));
        assert_eq!(ewens_weight(&swap, &q(2, 1)).unwrap(), q(1, 3));
        assert!(ewens_weight(&id, &q(0, 1)).is_err());
        assert!(ewens_weight(&id, &q(-1, 2)).is_err());
    }

    #[test]
    fn ewens_weights_sum_to_one() {
        for n in 1..=7 {
            for theta in [q(1, 2), q(1, 1), q(2, 1), q(7, 3)] {
                let total = enumerate_sn(n)
                    .unwrap()
                    .map(|p| ewens_weight(&p, &theta).unwrap())
                    .fold(q(0, 1), |a, b| a + b);
                assert_eq!(total, q(1, 1), "n={n} theta={theta}");
            }
        }
    }

    #[test]
    fn exact_cycle_moment_examples() {
        assert_eq!(exact_cycle_moment(2, &q(1, 1), &[(1, 1)]).unwrap(), q(1, 1));
        assert_eq!(exact_cycle_moment(2, &q(1, 1), &[(1, 2)]).unwrap(), q(2, 1));
        assert_eq!(exact_cycle_moment(4, &q(1, 1), &[(1, 2), (2, 1)]).unwrap(), q(1, 1));
        assert!(exact_cycle_moment(11, &q(1, 1), &[(1, 1)]).is_err());
        assert!(exact_cycle_moment(3, &q(1, 1), &[(4, 1)]).is_err());
    }

    #[test]
    fn exact_cycle_moment_is_touchard_at_reciprocal() {
        for n in 1..=8 {
            let tally = SymmetricGroupTally::new(n).unwrap();
            for m in 1..=n {
                for k in 1..=(n / m) {
                    let got = tally.cycle_moment(&q(1, 1), &[(m, k as u32)]).unwrap();
                    let want = touchard::<BigRational>(k).eval(&q(1, m as i64));
                    assert_eq!(got, want, "n={n} m={m} k={k}");
                }
            }
        }
    }

    #[test]
    fn closed_form_examples() {
        assert_eq!(closed_cycle_moment(4, &q(1, 1), 2, 1).unwrap(), q(1, 2));
        assert_eq!(closed_cycle_moment(2, &q(1, 1), 1, 2).unwrap(), q(2, 1));
        assert_eq!(
            closed_cycle_moment(6, &q(2, 1), 2, 1).unwrap(),
            exact_cycle_moment(6, &q(2, 1), &[(2, 1)]).unwrap()
        );
        assert!(matches!(closed_cycle_moment(3, &q(1, 1), 2, 2), Err(Error::Domain(_))));
        assert!(closed_cycle_moment(6, &q(0, 1), 2, 1).is_err());
    }

    #[test]
    fn closed_form_matches_enumeration() {
        for n in 1..=8 {
            let tally = SymmetricGroupTally::new(n).unwrap();
            for theta in [q(1, 1), q(2, 1), q(1, 2)] {
                for m in 1..=n {
                    for k in 1..=(n / m) {
                        assert_eq!(
                            closed_cycle_moment(n, &theta, m, k).unwrap(),
                            tally.cycle_moment(&theta, &[(m, k as u32)]).unwrap(),
                            "n={n} theta={theta} m={m} k={k}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn closed_form_in_floating_point() {
        let exact = closed_cycle_moment(9, &q(3, 2), 2, 3).unwrap();
        let float = closed_cycle_moment(9, &1.5_f64, 2, 3).unwrap();
        assert!((crate::scalar::rational_to_f64(&exact) - float).abs() < 1e-12);
    }

    #[test]
    fn fixed_set_moment_examples() {
        assert_eq!(exact_fixed_set_moment(4, 2, 1).unwrap(), q(1, 1));
        assert_eq!(exact_fixed_set_moment(4, 2, 2).unwrap(), q(3, 1));
        assert_eq!(exact_fixed_set_moment(6, 3, 2).unwrap(), q(4, 1));
        assert!(exact_fixed_set_moment(11, 2, 1).is_err());
    }
}
