use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;

use permcover::covers::{gamma, gamma_binomial_sum, UVector};
use permcover::ewens::{cycle_count_samples, sample_cycle_counts_replicate, SamplerConfig};
use permcover::exactcomb::{binomial, falling_factorial, stirling2};
use permcover::limitdist::dist_e_with_order;
use permcover::perm::{cycle_type, fixed_set_count, fixed_set_count_direct, Permutation};
use permcover::{Polynomial, RationalPolynomial};

fn permutation(max_n: usize) -> impl Strategy<Value = Permutation> {
    (1..=max_n)
        .prop_flat_map(|n| Just((1..=n).collect::<Vec<usize>>()).prop_shuffle())
        .prop_map(|images| Permutation::from_images(images).unwrap())
}

fn u_vector(max_m: usize, max_entry: usize) -> impl Strategy<Value = (usize, UVector)> {
    (1..=max_m).prop_flat_map(move |m| {
        (Just(m), prop::collection::vec(0..=max_entry, m).prop_map(UVector))
    })
}

fn rational() -> impl Strategy<Value = BigRational> {
    (-30i64..=30, 1i64..=7).prop_map(|(n, d)| BigRational::new(n.into(), d.into()))
}

fn rational_poly() -> impl Strategy<Value = RationalPolynomial> {
    prop::collection::vec(rational(), 0..6).prop_map(Polynomial::new)
}

proptest! {
    #[test]
    fn gamma_equals_binomial_sum((m, u) in u_vector(8, 5)) {
        prop_assert_eq!(gamma(m, &u).unwrap(), gamma_binomial_sum(m, &u).unwrap());
    }

    #[test]
    fn gamma_vanishes_below_total_size((m, u) in u_vector(8, 3)) {
        // drop entries from the top until sum_j j u_j < m
        let mut u = u.0;
        for j in (0..m).rev() {
            if u.iter().enumerate().map(|(i, &x)| (i + 1) * x).sum::<usize>() < m {
                break;
            }
            u[j] = 0;
        }
        prop_assert!(gamma(m, &UVector(u)).unwrap().is_zero());
    }

    #[test]
    fn fixed_set_count_depends_only_on_cycle_type(p in permutation(7), m_seed in 0usize..7) {
        let n = p.n();
        let m = 1 + m_seed % n;
        let by_type = fixed_set_count(&cycle_type(&p), m);
        let direct = fixed_set_count_direct(&p, m, u64::MAX).unwrap();
        prop_assert!(by_type <= binomial(n, m));
        prop_assert_eq!(by_type, direct);
    }

    #[test]
    fn cycle_notation_round_trips(p in permutation(12)) {
        let text = p.to_string();
        prop_assert_eq!(Permutation::parse_cycles(&text, None).unwrap(), p.clone());
        let json = serde_json::to_string(&p).unwrap();
        prop_assert_eq!(serde_json::from_str::<Permutation>(&json).unwrap(), p);
    }

    #[test]
    fn sampled_cycle_counts_fill_n(n in 1usize..200, theta in 0.05f64..20.0, seed: u64, r in 0usize..1000) {
        let cfg = SamplerConfig::new(n, theta, seed, r + 1).unwrap();
        let c = sample_cycle_counts_replicate(&cfg, r, n);
        let total: usize = c.iter().enumerate().map(|(j, &cj)| (j + 1) * cj as usize).sum();
        prop_assert_eq!(total, n);
        prop_assert_eq!(sample_cycle_counts_replicate(&cfg, r, n), c);
    }

    #[test]
    fn parallel_samples_are_reproducible(n in 1usize..50, seed: u64) {
        let cfg = SamplerConfig::new(n, 1.5, seed, 64).unwrap();
        let a = cycle_count_samples(&cfg, n).unwrap();
        let b = cycle_count_samples(&cfg, n).unwrap();
        prop_assert_eq!(&a, &b);
        for (r, counts) in a.iter().enumerate() {
            prop_assert_eq!(&sample_cycle_counts_replicate(&cfg, r, n), counts);
        }
    }

    #[test]
    fn powers_expand_in_falling_factorials(x in rational(), n in 0usize..=10) {
        let lhs = (0..n).fold(BigRational::one(), |acc, _| acc * &x);
        let rhs = (0..=n).fold(BigRational::zero(), |acc, j| {
            acc + BigRational::from_integer(BigInt::from(stirling2(n, j))) * falling_factorial(&x, j)
        });
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn polynomial_ring_operations_match_evaluation(p in rational_poly(), q in rational_poly(), x in rational()) {
        prop_assert_eq!((&p * &q).eval(&x), p.eval(&x) * q.eval(&x));
        prop_assert_eq!((&p + &q).eval(&x), p.eval(&x) + q.eval(&x));
        let prod = &p * &q;
        if !p.is_zero() && !q.is_zero() {
            prop_assert_eq!(prod.degree(), p.degree() + q.degree());
        } else {
            prop_assert_eq!(prod.degree(), -1);
        }
    }

    #[test]
    fn truncated_law_keeps_its_mass_contract(m in 1usize..=6, e in 1u32..=8) {
        let eps = 10f64.powi(-(e as i32));
        let d = dist_e_with_order(m, eps, 0, 20_000_000).unwrap();
        prop_assert!(1.0 - d.mass_captured <= eps);
        prop_assert!(d.support.windows(2).all(|w| w[0].0 < w[1].0));
    }
}

#[test]
fn gamma_of_identity_like_inputs_is_binomial() {
    // u = (n, 0, ..., 0) is the cycle type of the identity: γ_m = C(n, m)
    for m in 1..=6 {
        for n in 0..=8 {
            let mut u = vec![0; m];
            u[0] = n;
            assert_eq!(gamma(m, &UVector(u)).unwrap(), binomial(n, m));
        }
    }
    assert_eq!(binomial(3, 5), BigUint::zero());
}
