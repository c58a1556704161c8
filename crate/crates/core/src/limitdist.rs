//! The limiting fixed-set statistic `E_m = γ_m(Z_1, Z_{1/2}, ..., Z_{1/m})`
//! with independent `Z_{1/j} ~ Poisson(1/j)`: its law, its moment generating
//! function `V_m(x) = E exp(x E_m)`, and the exponential generating function
//! of the cover counts.
//!
//! The law is computed by summing the joint Poisson weights
//! `e^{-H_m} prod_j j^{-u_j} / u_j!` over a box `u_j <= U_j`, aggregating the
//! weight of each point onto `γ_m(u)`. Every cap `U_j` is the smallest value
//! whose certified Poisson tail (optionally weighted, see
//! [`dist_e_with_order`]) is below `ε / (2m)`, so by the union bound the
//! missed mass is below `ε / 2`.
//!
//! For `m >= 2` and `x > 0` the expectation `E exp(x E_m)` is infinite:
//! already `E_2 >= C(Z_1, 2)` and `exp(x r^2 / 2)` outgrows `1/r!`. Only
//! `x <= 0` is accepted there (any `x <= 1` for `m = 1`, where
//! `V_1(x) = exp(e^x - 1)`).

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::covers::count_covers;
use crate::error::{domain, resource, Result};
use crate::exactcomb::factorial;
use crate::scalar::{CompensatedSum, Real};

pub const MAX_LIMIT_M: usize = 12;

/// Largest number of box points any single evaluation may visit.
pub const DEFAULT_BOX_BUDGET: u64 = 20_000_000;

/// Moment order whose tail [`dist_e`] controls.
pub const DEFAULT_MOMENT_ORDER: u32 = 3;

/// Truncated law of `E_m`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruncatedDistribution<T> {
    /// `(value, probability)` pairs sorted by value.
    pub support: Vec<(u64, T)>,
    pub mass_captured: T,
    pub epsilon: T,
}

impl<T: Real> TruncatedDistribution<T> {
    pub fn moment(&self, k: u32) -> T {
        self.support
            .iter()
            .map(|&(v, p)| p * T::from_u64(v).unwrap().powi(k as i32))
            .collect::<CompensatedSum<T>>()
            .value()
    }

    pub fn mean(&self) -> T {
        self.moment(1)
    }

    pub fn variance(&self) -> T {
        let mean = self.mean();
        self.moment(2) - mean * mean
    }

    pub fn prob(&self, value: u64) -> T {
        self.support
            .iter()
            .find(|(v, _)| *v == value)
            .map(|&(_, p)| p)
            .unwrap_or_else(T::zero)
    }
}

/// `V_m(x)` with a certified bound on the discarded part of the sum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EgfValue<T> {
    pub x: T,
    pub value: T,
    pub truncation_bound: T,
}

/// Rigorous enclosure `lower <= P(E_m >= 1) <= upper`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval<T> {
    pub lower: T,
    pub upper: T,
}

fn check_m_eps<T: Real>(m: usize, epsilon: T) -> Result<()> {
    if m == 0 || m > MAX_LIMIT_M {
        return domain(format!("m must lie in 1..={MAX_LIMIT_M}, got {m}"));
    }
    if !(epsilon > T::zero() && epsilon <= T::lit(0.1)) {
        return domain(format!("epsilon must lie in (0, 0.1], got {epsilon:?}"));
    }
    Ok(())
}

/// Poisson(`lambda`) probabilities `0..=cap` together with the smallest cap
/// for which the certified bound on `sum_{u > cap} (1+u)^power P(u)` is below
/// `target`. Returns `(pmf, tail_bound)`.
fn poisson_cap<T: Real>(lambda: T, power: u32, target: T) -> (Vec<T>, T) {
    // a_u = (1+u)^power * P(Z = u); a_{u+1}/a_u = ((u+2)/(u+1))^power * lambda/(u+1),
    // decreasing in u, so the tail past U is at most a_{U+1} / (1 - a_{U+2}/a_{U+1})
    let weight = |u: usize| T::from_count(u + 1).powi(power as i32);
    let ratio = |u: usize| {
        let u1 = T::from_count(u + 1);
        (T::from_count(u + 2) / u1).powi(power as i32) * lambda / u1
    };
    let mut pmf = vec![(-lambda).exp()];
    loop {
        let cap = pmf.len() - 1;
        let p_next = pmf[cap] * lambda / T::from_count(cap + 1);
        let a_next = weight(cap + 1) * p_next;
        let r = ratio(cap + 1);
        if r < T::one() {
            let bound = a_next / (T::one() - r);
            if bound < target {
                return (pmf, bound);
            }
        }
        pmf.push(p_next);
    }
}

struct BoxPlan<T> {
    pmfs: Vec<Vec<T>>,
    missed_bound: T,
}

fn plan_box<T: Real>(m: usize, epsilon: T, order: u32, budget: u64) -> Result<BoxPlan<T>> {
    let target = epsilon / T::from_count(2 * m);
    let mut pmfs = Vec::with_capacity(m);
    let mut missed = T::zero();
    let mut points: u128 = 1;
    for j in 1..=m {
        let power = order * (m / j) as u32;
        let (pmf, tail) = poisson_cap(T::one() / T::from_count(j), power, target);
        points = points.saturating_mul(pmf.len() as u128);
        pmfs.push(pmf);
        missed = missed + tail;
    }
    if points > budget as u128 {
        return resource(format!(
            "the Poisson box for m={m}, epsilon={epsilon:?} has {points} points (budget {budget})"
        ));
    }
    Ok(BoxPlan {
        pmfs,
        missed_bound: missed,
    })
}

/// Visits every box point as `(weight, γ_m(u))`. The truncated product
/// `prod_{i<=j} (1+z^i)^{u_i}` is carried along the depth-first walk.
fn walk_box<T: Real>(plan: &BoxPlan<T>, m: usize, f: &mut impl FnMut(T, u64)) -> Result<()> {
    let mut poly = vec![0u128; m + 1];
    poly[0] = 1;
    walk(plan, m, 1, T::one(), &poly, f)
}

fn walk<T: Real>(
    plan: &BoxPlan<T>,
    m: usize,
    j: usize,
    weight: T,
    poly: &[u128],
    f: &mut impl FnMut(T, u64),
) -> Result<()> {
    if j > m {
        let g = u64::try_from(poly[m])
            .or_else(|_| resource("γ_m(u) exceeds 64 bits"))?;
        f(weight, g);
        return Ok(());
    }
    let mut current = poly.to_vec();
    for (u, &p) in plan.pmfs[j - 1].iter().enumerate() {
        if u > 0 {
            // multiply by (1 + z^j), truncated at degree m
            for d in (j..=m).rev() {
                current[d] = current[d]
                    .checked_add(current[d - j])
                    .ok_or_else(|| crate::Error::Resource("γ_m(u) overflow".into()))?;
            }
        }
        walk(plan, m, j + 1, weight * p, &current, f)?;
    }
    Ok(())
}

/// Law of `E_m` with missed mass at most `epsilon`, using caps that also
/// control the tail of moments up to order [`DEFAULT_MOMENT_ORDER`].
pub fn dist_e<T: Real>(m: usize, epsilon: T) -> Result<TruncatedDistribution<T>> {
    dist_e_with_order(m, epsilon, DEFAULT_MOMENT_ORDER, DEFAULT_BOX_BUDGET)
}

/// Law of `E_m` with caps chosen for moments of order `order`.
///
/// Since at most `m / j` cycles of length `j` fit in a fixed set,
/// `γ_m(u) <= prod_j (1 + u_j)^{m/j}`. The cap on `u_j` is therefore chosen
/// from the tail of `E[(1 + Z_{1/j})^{order * (m/j)}]`; `order = 0` gives the
/// plain mass criterion.
pub fn dist_e_with_order<T: Real>(
    m: usize,
    epsilon: T,
    order: u32,
    budget: u64,
) -> Result<TruncatedDistribution<T>> {
    Ok(truncated_law(m, epsilon, order, budget)?.0)
}

/// The truncated law together with the certified bound on its missed mass.
fn truncated_law<T: Real>(
    m: usize,
    epsilon: T,
    order: u32,
    budget: u64,
) -> Result<(TruncatedDistribution<T>, T)> {
    check_m_eps(m, epsilon)?;
    let plan = plan_box(m, epsilon, order, budget)?;
    let mut mass: BTreeMap<u64, CompensatedSum<T>> = BTreeMap::new();
    walk_box(&plan, m, &mut |w, g| mass.entry(g).or_default().add(w))?;
    let support: Vec<(u64, T)> = mass
        .into_iter()
        .map(|(g, s)| (g, s.value()))
        .filter(|(_, p)| *p > T::zero())
        .collect();
    let mass_captured = support.iter().map(|s| s.1).collect::<CompensatedSum<T>>().value();
    let dist = TruncatedDistribution {
        support,
        mass_captured: mass_captured.min(T::one()),
        epsilon,
    };
    Ok((dist, plan.missed_bound))
}

/// Largest `x` for which [`vm_eval`] can certify its truncation.
pub fn vm_x_max<T: Real>(m: usize) -> T {
    if m == 1 {
        T::one()
    } else {
        T::zero()
    }
}

/// `V_m(x) = e^{-H_m} sum_u prod_j (j^{-u_j}/u_j!) exp(x γ_m(u))`, summed
/// over the mass-only Poisson box.
///
/// For `x <= 0` every discarded term is at most its weight, so the discarded
/// part is below the box's missed mass. For `m = 1` and `0 < x <= 1` the sum
/// is `e^{-1} sum_u e^{xu}/u!`; the cap is raised until its geometric tail
/// bound is below `epsilon`.
pub fn vm_eval<T: Real>(m: usize, x: T, epsilon: T) -> Result<EgfValue<T>> {
    check_m_eps(m, epsilon)?;
    if !x.is_finite() || x > vm_x_max(m) {
        return domain(format!(
            "V_{m}(x) diverges or cannot be certified for x = {x:?}; need x <= {:?}",
            vm_x_max::<T>(m)
        ));
    }
    let mut plan = plan_box(m, epsilon, 0, DEFAULT_BOX_BUDGET)?;
    let mut truncation_bound = plan.missed_bound;
    if x > T::zero() {
        // m == 1: the tail e^{-1} sum_{u > U} e^{xu} / u! is geometric once
        // e^x < U + 2; grow U until it is below epsilon
        let ex = x.exp();
        loop {
            let pmf = &mut plan.pmfs[0];
            let cap = pmf.len() - 1;
            let next = pmf[cap] / T::from_count(cap + 1);
            let r = ex / T::from_count(cap + 2);
            if r < T::one() {
                truncation_bound = next * (x * T::from_count(cap + 1)).exp() / (T::one() - r);
                if truncation_bound < epsilon {
                    break;
                }
            }
            pmf.push(next);
        }
    }
    let mut sum = CompensatedSum::new();
    walk_box(&plan, m, &mut |w, g| sum.add(w * (x * T::from_u64(g).unwrap()).exp()))?;
    Ok(EgfValue {
        x,
        value: sum.value(),
        truncation_bound,
    })
}

/// Closed forms for `m = 2, 3`:
///
/// `V_2(x) = e^{-3/2} e^{e^x/2} sum_r e^{C(r,2) x} / r!`,
/// `V_3(x) = e^{-11/6} e^{e^x/3} sum_r e^{C(r,3) x + e^{rx}/2} / r!`.
///
/// Both series diverge for `x > 0`. For `x <= 0` each term is at most
/// `c / r!` (`c = 1` for `m = 2`, `c = e^{1/2}` for `m = 3`), which bounds the
/// tail; summation stops once three consecutive terms fall below
/// `1e-3 * machine epsilon * partial sum` and that bound is met too.
pub fn vm_closed<T: Real>(m: usize, x: T) -> Result<EgfValue<T>> {
    if m != 2 && m != 3 {
        return domain(format!("closed forms exist only for m = 2, 3, got {m}"));
    }
    if !x.is_finite() || x > T::zero() {
        return domain(format!("the closed-form series for V_{m} diverges at x = {x:?}"));
    }
    let half = T::lit(0.5);
    let (prefactor, term_cap) = if m == 2 {
        ((T::lit(-1.5) + half * x.exp()).exp(), T::one())
    } else {
        ((T::lit(-11.0 / 6.0) + x.exp() / T::lit(3.0)).exp(), half.exp())
    };
    let tiny = T::lit(1e-3) * T::epsilon();
    let mut sum = CompensatedSum::new();
    let mut inv_fact = T::one();
    let mut small_run = 0;
    let mut r = 0usize;
    loop {
        if r > 0 {
            inv_fact = inv_fact / T::from_count(r);
        }
        let rt = T::from_count(r);
        let exponent = if m == 2 {
            rt * (rt - T::one()) * half * x
        } else {
            rt * (rt - T::one()) * (rt - T::lit(2.0)) / T::lit(6.0) * x + half * (rt * x).exp()
        };
        let term = exponent.exp() * inv_fact;
        sum.add(term);
        let partial = sum.value();
        small_run = if term < tiny * partial { small_run + 1 } else { 0 };
        // sum_{s > r} c/s! <= c / (r+1)! / (1 - 1/(r+2))
        let next_fact = inv_fact / T::from_count(r + 1);
        let tail = term_cap * next_fact / (T::one() - T::one() / T::from_count(r + 2));
        if small_run >= 3 && tail < tiny * partial {
            return Ok(EgfValue {
                x,
                value: prefactor * partial,
                truncation_bound: prefactor * tail,
            });
        }
        r += 1;
    }
}

/// `v_{k;m} / k!` for `k = 1..=max_k`: the exponential generating function
/// coefficients of the cover counts (the constant term is 1).
pub fn vm_series_coeffs(m: usize, max_k: usize) -> Result<Vec<BigRational>> {
    (1..=max_k)
        .map(|k| {
            let v = count_covers(k, m)?.value;
            Ok(BigRational::new(BigInt::from(v), BigInt::from(factorial(k))))
        })
        .collect()
}

/// Enclosure of `P(E_m >= 1)` of width at most `epsilon`.
pub fn prob_nonzero<T: Real>(m: usize, epsilon: T) -> Result<Interval<T>> {
    let (dist, missed) = truncated_law(m, epsilon, 0, DEFAULT_BOX_BUDGET)?;
    let lower = dist
        .support
        .iter()
        .filter(|(v, _)| *v >= 1)
        .map(|s| s.1)
        .collect::<CompensatedSum<T>>()
        .value();
    Ok(Interval {
        lower,
        upper: (lower + missed).min(T::one()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::covers::{gamma, UVector};
    use crate::scalar::rational_to_f64;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn e1_is_poisson_one() {
        let d = dist_e(1, 1e-10).unwrap();
        assert!((d.prob(0) - (-1.0f64).exp()).abs() < 1e-15);
        assert!((d.prob(3) - (-1.0f64).exp() / 6.0).abs() < 1e-15);
        assert!(1.0 - d.mass_captured <= 1e-10);
    }

    #[test]
    fn captured_mass_contract() {
        for m in 1..=6 {
            for eps in [0.1, 1e-3, 1e-6] {
                let d = dist_e_with_order(m, eps, 0, DEFAULT_BOX_BUDGET).unwrap();
                assert!(1.0 - d.mass_captured <= eps, "m={m} eps={eps}");
                assert!(d.support.iter().all(|s| s.1 > 0.0));
            }
        }
    }

    #[test]
    fn low_order_moments() {
        for m in 1..=4 {
            let d = dist_e(m, 1e-8f64).unwrap();
            assert!((d.mean() - 1.0).abs() < 1e-6, "m={m} mean={}", d.mean());
            assert!((d.moment(2) - (m as f64 + 1.0)).abs() < 1e-6);
            assert!((d.variance() - m as f64).abs() < 1e-6);
        }
    }

    #[test]
    fn third_moments_match_cover_counts() {
        for m in 1..=4 {
            let d = dist_e(m, 1e-8f64).unwrap();
            let v3 = rational_to_f64(&BigRational::from_integer(count_covers(3, m).unwrap().value.into()));
            assert!((d.moment(3) - v3).abs() < 1e-6 * v3, "m={m}: {} vs {v3}", d.moment(3));
        }
    }

    #[test]
    fn probability_of_zero_for_m2() {
        // E_2 = 0 iff u_1 <= 1 and u_2 = 0: e^{-3/2} (1 + 1)
        let d = dist_e(2, 1e-10).unwrap();
        let want = 2.0 * (-1.5f64).exp();
        assert!((d.prob(0) - want).abs() < 1e-12);
        let iv = prob_nonzero(2, 1e-6).unwrap();
        assert!(iv.lower <= 1.0 - want && 1.0 - want <= iv.upper);
    }

    #[test]
    fn prob_nonzero_interval() {
        let iv = prob_nonzero(1, 1e-6).unwrap();
        let want = 1.0 - (-1.0f64).exp();
        assert!(iv.lower <= want && want <= iv.upper);
        for m in 1..=8 {
            let iv = prob_nonzero(m, 0.01).unwrap();
            assert!(iv.upper - iv.lower <= 0.01);
            assert!(iv.lower <= iv.upper);
        }
    }

    #[test]
    fn argument_checks() {
        assert!(dist_e(0, 0.01f64).is_err());
        assert!(dist_e(13, 0.01f64).is_err());
        assert!(dist_e(2, 0.5f64).is_err());
        assert!(dist_e(2, 0.0f64).is_err());
        assert!(vm_eval(2, 0.3f64, 1e-6).is_err());
        assert!(vm_eval(1, 1.5f64, 1e-6).is_err());
        assert!(vm_closed(4, -0.1f64).is_err());
        assert!(vm_closed(2, 0.3f64).is_err());
        assert!(matches!(
            dist_e_with_order(12, 1e-8f64, 0, 1000),
            Err(crate::Error::Resource(_))
        ));
    }

    #[test]
    fn egf_at_zero_is_one() {
        for m in 1..=8 {
            let v = vm_eval(m, 0.0f64, 1e-6).unwrap();
            assert!((v.value - 1.0).abs() <= 1e-6);
        }
        assert_eq!(vm_closed(2, 0.0f64).unwrap().value, 1.0);
    }

    #[test]
    fn v1_matches_exp_exp() {
        for x in [-1.0f64, -0.2, 0.3, 1.0] {
            let v = vm_eval(1, x, 1e-12).unwrap();
            let want = (x.exp() - 1.0).exp();
            assert!((v.value - want).abs() < 1e-11, "x={x}");
            assert!((v.value - want).abs() <= v.truncation_bound + 1e-14);
        }
    }

    #[test]
    fn closed_forms_agree_with_box_sum() {
        for x in [-1.0f64, -0.5, -0.1, 0.0] {
            let a = vm_eval(2, x, 1e-10).unwrap();
            let b = vm_closed(2, x).unwrap();
            assert!((a.value - b.value).abs() < 1e-9);
            let a = vm_eval(3, x, 1e-9).unwrap();
            let b = vm_closed(3, x).unwrap();
            assert!((a.value - b.value).abs() < 1e-8);
        }
    }

    #[test]
    fn series_coefficients() {
        assert_eq!(
            vm_series_coeffs(1, 4).unwrap(),
            vec![q(1, 1), q(1, 1), q(5, 6), q(15, 24)]
        );
        assert_eq!(vm_series_coeffs(2, 2).unwrap(), vec![q(1, 1), q(3, 2)]);
        assert_eq!(vm_series_coeffs(3, 1).unwrap(), vec![q(1, 1)]);
    }

    #[test]
    fn truncated_egf_approximates_box_sum_for_small_negative_x() {
        // for x < 0 the Taylor remainder of E exp(x E_m) after K terms is at
        // most |x|^{K+1} E[E_m^{K+1}] / (K+1)! = |x|^{K+1} v_{K+1;m} / (K+1)!
        let k = 8;
        for m in 1..=3 {
            for x in [-0.1f64, -0.05, -0.02] {
                let coeffs = vm_series_coeffs(m, k + 1).unwrap();
                let series: f64 = 1.0
                    + coeffs[..k]
                        .iter()
                        .enumerate()
                        .map(|(i, c)| rational_to_f64(c) * x.powi(i as i32 + 1))
                        .sum::<f64>();
                let tail = rational_to_f64(&coeffs[k]) * x.abs().powi(k as i32 + 1);
                let v = vm_eval(m, x, 1e-10).unwrap();
                let diff = (v.value - series).abs();
                assert!(diff <= 2.0 * (v.truncation_bound + tail), "m={m} x={x} diff={diff}");
                if m <= 2 && x == -0.05 {
                    assert!(diff < 1e-6, "m={m}: {diff}");
                }
            }
        }
    }

    #[test]
    fn box_walk_gamma_matches_polynomial_gamma() {
        let plan = plan_box::<f64>(4, 0.05, 0, DEFAULT_BOX_BUDGET).unwrap();
        let mut seen = Vec::new();
        walk_box(&plan, 4, &mut |_, g| seen.push(g)).unwrap();
        let caps: Vec<usize> = plan.pmfs.iter().map(|p| p.len()).collect();
        let mut idx = 0;
        for a in 0..caps[0] {
            for b in 0..caps[1] {
                for c in 0..caps[2] {
                    for d in 0..caps[3] {
                        let g = gamma(4, &UVector(vec![a, b, c, d])).unwrap();
                        assert_eq!(num_bigint::BigUint::from(seen[idx]), g);
                        idx += 1;
                    }
                }
            }
        }
    }

    #[test]
    fn single_precision_path() {
        let d = dist_e(2, 1e-4f32).unwrap();
        assert!((d.mean() - 1.0).abs() < 1e-3);
    }
}
