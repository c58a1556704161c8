//! Verification suites. Each comparison becomes a [`Check`]; the suites only
//! report, they never stop at the first failure.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use permcover::covers::{self, UVector};
use permcover::ewens::{self, SamplerConfig};
use permcover::exactcomb::{self, bell, stirling1_unsigned, stirling2, touchard};
use permcover::limitdist;
use permcover::perm::{self, SymmetricGroupTally};
use permcover::scalar::rational_to_f64;

use crate::report::{nat, num, rat, Check, Report};
use crate::Suite;

/// Replicates used by the Monte Carlo part of the cycle-count suite.
const MC_REPLICATES: usize = 20_000;

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn big(x: &BigUint) -> BigRational {
    BigRational::from_integer(BigInt::from(x.clone()))
}

fn rats(xs: &[BigRational]) -> Value {
    xs.iter().map(rat).collect()
}

fn failed(name: impl Into<String>, err: impl std::fmt::Display) -> Check {
    Check::with_status(name, false, Value::String(err.to_string()), Value::Null, None)
}

pub fn run_suite(suite: Suite, seed: u64) -> Report {
    let name = match suite {
        Suite::TheoremC => "verify theoremC",
        Suite::Theorem1 => "verify theorem1",
        Suite::Theorem2 => "verify theorem2",
        Suite::Identities => "verify identities",
        Suite::All => "verify all",
    };
    let mut report = Report::new(name);
    let mut checks = Vec::new();
    let randomized = matches!(suite, Suite::TheoremC | Suite::Identities | Suite::All);
    if matches!(suite, Suite::TheoremC | Suite::All) {
        cycle_moments(&mut checks, seed);
    }
    if matches!(suite, Suite::Theorem1 | Suite::All) {
        fixed_set_moments(&mut checks);
    }
    if matches!(suite, Suite::Theorem2 | Suite::All) {
        limit_law(&mut checks);
    }
    if matches!(suite, Suite::Identities | Suite::All) {
        identities(&mut checks, seed);
    }
    let passed = checks.iter().filter(|c| c.passed()).count();
    report
        .output("checks_total", checks.len())
        .output("checks_passed", passed);
    report.checks = checks;
    if randomized {
        report.seed = Some(seed);
    }
    report
}

fn cycle_moments(out: &mut Vec<Check>, seed: u64) {
    let tallies: Vec<SymmetricGroupTally> = (1..=8)
        .map(|n| SymmetricGroupTally::new(n).expect("n <= 8 is enumerable"))
        .collect();
    let one = BigRational::one();

    // E C_m^k = T_k(1/m) at θ = 1 for every n >= mk
    for m in 1..=7usize {
        for k in 1..=7usize {
            if m * k > 7 {
                continue;
            }
            let want = touchard::<BigRational>(k).eval(&q(1, m as i64));
            let got: Result<Vec<_>, _> = tallies[m * k - 1..7]
                .iter()
                .map(|t| t.cycle_moment(&one, &[(m, k as u32)]))
                .collect();
            let name = format!("E C_{m}^{k} = T_{k}(1/{m}) for n = {}..7", m * k);
            out.push(match got {
                Ok(vals) => {
                    let ok = vals.iter().all(|v| *v == want);
                    Check::with_status(name, ok, rats(&vals), rat(&want), None)
                }
                Err(e) => failed(name, e),
            });
        }
    }

    // joint moments factor
    for (m1, k1, m2, k2) in [(1usize, 1usize, 2usize, 1usize), (1, 2, 2, 1), (1, 1, 3, 1), (2, 1, 3, 1)] {
        let want = touchard::<BigRational>(k1).eval(&q(1, m1 as i64))
            * touchard::<BigRational>(k2).eval(&q(1, m2 as i64));
        let lo = m1 * k1 + m2 * k2;
        let got: Result<Vec<_>, _> = tallies[lo - 1..8]
            .iter()
            .map(|t| t.cycle_moment(&one, &[(m1, k1 as u32), (m2, k2 as u32)]))
            .collect();
        let name = format!("E C_{m1}^{k1} C_{m2}^{k2} = T_{k1}(1/{m1}) T_{k2}(1/{m2}) for n = {lo}..8");
        out.push(match got {
            Ok(vals) => {
                let ok = vals.iter().all(|v| *v == want);
                Check::with_status(name, ok, rats(&vals), rat(&want), None)
            }
            Err(e) => failed(name, e),
        });
    }

    // closed form vs enumeration for general θ
    for theta in [q(1, 2), q(1, 1), q(2, 1)] {
        for (m, k) in [(1usize, 1usize), (1, 3), (2, 1), (2, 2), (2, 3), (3, 2), (7, 1)] {
            let ns = m * k..=7;
            let name = format!("closed form vs enumeration, θ = {theta}, m = {m}, k = {k}, n = {}..7", m * k);
            let closed: Result<Vec<_>, _> =
                ns.clone().map(|n| perm::closed_cycle_moment(n, &theta, m, k)).collect();
            let exact: Result<Vec<_>, _> = ns
                .map(|n| tallies[n - 1].cycle_moment(&theta, &[(m, k as u32)]))
                .collect();
            out.push(match (closed, exact) {
                (Ok(a), Ok(b)) => Check::with_status(name, a == b, rats(&a), rats(&b), None),
                (Err(e), _) | (_, Err(e)) => failed(name, e),
            });
        }
    }

    // Monte Carlo at n = 1000: Poisson(1/2) law of C_2, E C_2^2, cov(C_1, C_2)
    let cfg = match SamplerConfig::new(1000, 1.0, seed, MC_REPLICATES) {
        Ok(c) => c,
        Err(e) => return out.push(failed("sampler configuration", e)),
    };
    let samples = match ewens::cycle_count_samples(&cfg, 2) {
        Ok(s) => s,
        Err(e) => return out.push(failed("cycle-count sampling", e)),
    };
    let mut poisson = (-0.5f64).exp();
    for (j, est) in ewens::empirical_pmf(&samples, 2, 4).iter().enumerate() {
        if j > 0 {
            poisson *= 0.5 / j as f64;
        }
        out.push(Check::close(
            format!("P(C_2 = {j}) at n = 1000 vs Poisson(1/2), 4 standard errors"),
            est.estimate,
            poisson,
            4.0 * est.stderr,
        ));
    }
    let sq: Vec<f64> = samples.iter().map(|c| f64::from(c[1] * c[1])).collect();
    let m2 = ewens::mean_and_stderr(&sq);
    out.push(Check::close(
        "E C_2^2 at n = 1000 vs T_2(1/2) = 3/4, 4 standard errors",
        m2.estimate,
        0.75,
        4.0 * m2.stderr,
    ));
    let c1: Vec<f64> = samples.iter().map(|c| f64::from(c[0])).collect();
    let c2: Vec<f64> = samples.iter().map(|c| f64::from(c[1])).collect();
    let cov = ewens::covariance(&c1, &c2);
    out.push(Check::close(
        "cov(C_1, C_2) at n = 1000 vs 0, 4 standard errors",
        cov.estimate,
        0.0,
        4.0 * cov.stderr,
    ));
}

fn fixed_set_moments(out: &mut Vec<Check>) {
    let tallies: Vec<SymmetricGroupTally> = (1..=8)
        .map(|n| SymmetricGroupTally::new(n).expect("n <= 8 is enumerable"))
        .collect();
    for (m, k) in [(1usize, 3usize), (2, 1), (2, 2), (2, 3), (3, 1), (3, 2), (4, 1), (4, 2)] {
        let name = format!("E (E_{m})^{k} = v_{{{k};{m}}} for n = {}..8", k * m);
        let want = match covers::count_covers(k, m) {
            Ok(v) => big(&v.value),
            Err(e) => {
                out.push(failed(name, e));
                continue;
            }
        };
        let got: Result<Vec<_>, _> = tallies[k * m - 1..8]
            .iter()
            .map(|t| t.fixed_set_moment(m, k as u32))
            .collect();
        out.push(match got {
            Ok(vals) => {
                let ok = vals.iter().all(|v| *v == want);
                Check::with_status(name, ok, rats(&vals), rat(&want), None)
            }
            Err(e) => failed(name, e),
        });
    }

    let ks: Vec<Value> = (1..=10).map(|k| cover_value(k, 1)).collect();
    let bells: Vec<Value> = (1..=10).map(|k| nat(&bell(k))).collect();
    out.push(Check::exact("v_{k;1} = B_k for k = 1..10", ks.into(), bells.into()));
    let twos: Vec<Value> = (1..=20).map(|m| cover_value(2, m)).collect();
    let want: Vec<Value> = (1..=20u64).map(|m| Value::String((m + 1).to_string())).collect();
    out.push(Check::exact("v_{2;m} = m + 1 for m = 1..20", twos.into(), want.into()));
    for k in 1..=3 {
        for m in 1..=4 {
            let brute = covers::count_covers_bruteforce(k, m)
                .map(|v| nat(&v.value))
                .unwrap_or_else(|e| Value::String(e.to_string()));
            out.push(Check::exact(
                format!("v_{{{k};{m}}}: dynamic programming vs brute force"),
                cover_value(k, m),
                brute,
            ));
        }
    }
}

fn cover_value(k: usize, m: usize) -> Value {
    covers::count_covers(k, m)
        .map(|v| nat(&v.value))
        .unwrap_or_else(|e| Value::String(e.to_string()))
}

fn limit_law(out: &mut Vec<Check>) {
    for m in 1..=4usize {
        let d = match limitdist::dist_e(m, 1e-8f64) {
            Ok(d) => d,
            Err(e) => {
                out.push(failed(format!("law of E_{m}"), e));
                continue;
            }
        };
        out.push(Check::close(format!("E E_{m} = 1"), d.mean(), 1.0, 1e-6));
        out.push(Check::close(
            format!("E E_{m}^2 = {}", m + 1),
            d.moment(2),
            (m + 1) as f64,
            1e-6,
        ));
        out.push(Check::close(format!("Var E_{m} = {m}"), d.variance(), m as f64, 1e-6));
        if let Ok(v3) = covers::count_covers(3, m) {
            let v3 = rational_to_f64(&big(&v3.value));
            out.push(Check::close(
                format!("E E_{m}^3 = v_{{3;{m}}}"),
                d.moment(3),
                v3,
                1e-6 * v3,
            ));
        }
    }

    for x in [-1.0f64, -0.5, 0.0] {
        for (m, eps, tol) in [(2usize, 1e-10, 1e-9), (3, 1e-9, 1e-8)] {
            let name = format!("V_{m}({x}): box sum vs closed-form series");
            out.push(match (limitdist::vm_eval(m, x, eps), limitdist::vm_closed(m, x)) {
                (Ok(a), Ok(b)) => Check::close(name, a.value, b.value, tol),
                (Err(e), _) | (_, Err(e)) => failed(name, e),
            });
        }
    }
    for x in [-1.0f64, 0.5, 1.0] {
        let name = format!("V_1({x}) = exp(e^x - 1)");
        let want = (x.exp() - 1.0).exp();
        out.push(match limitdist::vm_eval(1, x, 1e-12) {
            Ok(v) => Check::close(name, v.value, want, 2.0 * v.truncation_bound + 1e-13 * want),
            Err(e) => failed(name, e),
        });
    }
    for m in 1..=8usize {
        let name = format!("V_{m}(0) = 1");
        out.push(match limitdist::vm_eval(m, 0.0f64, 1e-6) {
            Ok(v) => Check::close(name, v.value, 1.0, 1e-6),
            Err(e) => failed(name, e),
        });
    }

    // the Taylor remainder of E exp(x E_m), x < 0, after K terms is at most
    // |x|^{K+1} v_{K+1;m} / (K+1)!
    let k = 8usize;
    for m in 1..=3usize {
        for x in [-0.1f64, -0.05] {
            let name = format!("V_{m}({x}) vs its degree-{k} cover-count series");
            let coeffs = match limitdist::vm_series_coeffs(m, k + 1) {
                Ok(c) => c,
                Err(e) => {
                    out.push(failed(name, e));
                    continue;
                }
            };
            let series: f64 = 1.0
                + coeffs[..k]
                    .iter()
                    .enumerate()
                    .map(|(i, c)| rational_to_f64(c) * x.powi(i as i32 + 1))
                    .sum::<f64>();
            let tail = rational_to_f64(&coeffs[k]) * x.abs().powi(k as i32 + 1);
            out.push(match limitdist::vm_eval(m, x, 1e-10) {
                Ok(v) => Check::close(name, v.value, series, 2.0 * (v.truncation_bound + tail)),
                Err(e) => failed(name, e),
            });
        }
    }

    let p0 = 2.0 * (-1.5f64).exp();
    out.push(match limitdist::prob_nonzero(2, 1e-8f64) {
        Ok(iv) => Check::with_status(
            "P(E_2 >= 1) = 1 - 2 e^{-3/2} lies in the computed enclosure",
            iv.lower <= 1.0 - p0 && 1.0 - p0 <= iv.upper,
            json!([num(iv.lower), num(iv.upper)]),
            num(1.0 - p0),
            Some(1e-8),
        ),
        Err(e) => failed("P(E_2 >= 1) enclosure", e),
    });
}

fn identities(out: &mut Vec<Check>, seed: u64) {
    // x^n = sum_j {n j} (x)_j
    let points: Vec<BigRational> = (0..=10).map(|i| q(i, 1)).chain([q(1, 2), q(-7, 3)]).collect();
    for n in 0..=10usize {
        let lhs: Vec<BigRational> = points
            .iter()
            .map(|x| (0..n).fold(BigRational::one(), |acc, _| acc * x))
            .collect();
        let rhs: Vec<BigRational> = points
            .iter()
            .map(|x| {
                (0..=n).fold(BigRational::zero(), |acc, j| {
                    acc + big(&stirling2(n, j)) * exactcomb::falling_factorial(x, j)
                })
            })
            .collect();
        out.push(Check::exact(
            format!("x^{n} = sum_j {{{n} j}} (x)_j at x = 0..10, 1/2, -7/3"),
            rats(&lhs),
            rats(&rhs),
        ));
    }

    for theta in [q(1, 1), q(2, 1), q(5, 3)] {
        let lhs: Vec<BigRational> = (1..=10usize)
            .map(|n| {
                let mut acc = BigRational::zero();
                let mut power = BigRational::one();
                for k in 1..=n {
                    power *= &theta;
                    acc += big(&stirling1_unsigned(n, k).expect("1 <= k <= n")) * &power;
                }
                acc
            })
            .collect();
        let rhs: Vec<BigRational> = (1..=10)
            .map(|n| exactcomb::rising_factorial(&theta, n))
            .collect();
        out.push(Check::exact(
            format!("sum_k s(n,k) θ^k = θ^(n) at θ = {theta}, n = 1..10"),
            rats(&lhs),
            rats(&rhs),
        ));
    }

    let poly_ok = (1..=12usize).all(|n| {
        let p = exactcomb::rising_factorial_poly::<BigRational>(n);
        (1..=n).all(|k| p.coeff(k) == big(&stirling1_unsigned(n, k).expect("1 <= k <= n")))
            && p.coeff(0).is_zero()
    });
    out.push(Check::with_status(
        "coefficients of θ(θ+1)...(θ+n-1) are s(n,k), n = 1..12",
        poly_ok,
        Value::Bool(poly_ok),
        Value::Bool(true),
        None,
    ));

    let t1: Vec<Value> = (0..=15).map(|k| rat(&touchard::<BigRational>(k).eval(&BigRational::one()))).collect();
    let bells: Vec<Value> = (0..=15).map(|k| rat(&big(&bell(k)))).collect();
    out.push(Check::exact("T_k(1) = B_k for k = 0..15", t1.into(), bells.into()));

    let x = 0.5f64;
    let partial: f64 = (0..=25usize)
        .map(|n| {
            rational_to_f64(&BigRational::new(
                BigInt::from(bell(n)),
                BigInt::from(exactcomb::factorial(n)),
            )) * x.powi(n as i32)
        })
        .sum();
    out.push(Check::close(
        "sum_{n<=25} B_n x^n / n! = exp(e^x - 1) at x = 1/2",
        partial,
        (x.exp() - 1.0).exp(),
        1e-10,
    ));

    for n in 0..=15u32 {
        let want = rational_to_f64(&big(&bell(n as usize)));
        let name = format!("Dobiński series at x = 1 gives B_{n}");
        out.push(match exactcomb::dobinski(n, 1.0f64, 1e-10) {
            Ok(s) => Check::close(name, s.value, want, 1e-9 * want),
            Err(e) => failed(name, e),
        });
    }
    for (xq, xf) in [(q(1, 2), 0.5f64), (q(2, 1), 2.0)] {
        for n in [0u32, 1, 5, 10] {
            let want = rational_to_f64(&touchard::<BigRational>(n as usize).eval(&xq));
            let name = format!("Dobiński series gives T_{n}({xq})");
            out.push(match exactcomb::dobinski(n, xf, 1e-12) {
                Ok(s) => Check::close(name, s.value, want, 1e-9 * want),
                Err(e) => failed(name, e),
            });
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut mismatches = 0usize;
    for _ in 0..200 {
        let m = rng.random_range(1..=8usize);
        let u = UVector((0..m).map(|_| rng.random_range(0..=5usize)).collect());
        let a = covers::gamma(m, &u);
        let b = covers::gamma_binomial_sum(m, &u);
        if a.is_err() || a != b {
            mismatches += 1;
        }
    }
    out.push(Check::exact(
        "γ_m(u) polynomial coefficient = binomial sum on 200 random inputs",
        json!(mismatches),
        json!(0),
    ));

    let mut closed_bad = 0usize;
    let binom = exactcomb::binomial;
    for a in 0..=4usize {
        for b in 0..=4usize {
            for c in 0..=4usize {
                let g1 = covers::gamma(1, &UVector(vec![a])).ok();
                let g2 = covers::gamma(2, &UVector(vec![a, b])).ok();
                let g3 = covers::gamma(3, &UVector(vec![a, b, c])).ok();
                closed_bad += usize::from(g1 != Some(BigUint::from(a)))
                    + usize::from(g2 != Some(binom(a, 2) + b))
                    + usize::from(g3 != Some(binom(a, 3) + a * b + c));
            }
        }
    }
    out.push(Check::exact(
        "γ_1 = u_1, γ_2 = C(u_1,2) + u_2, γ_3 = C(u_1,3) + u_1 u_2 + u_3 on entries <= 4",
        json!(closed_bad),
        json!(0),
    ));

    for theta in [q(1, 2), q(1, 1), q(2, 1), q(7, 3)] {
        for n in 1..=6usize {
            let total = perm::enumerate_sn(n).map(|it| {
                it.map(|p| perm::ewens_weight(&p, &theta).expect("θ > 0"))
                    .fold(BigRational::zero(), |acc, w| acc + w)
            });
            let name = format!("Ewens weights on S_{n} sum to 1 at θ = {theta}");
            out.push(match total {
                Ok(t) => Check::exact(name, rat(&t), rat(&BigRational::one())),
                Err(e) => failed(name, e),
            });
        }
    }

    for n in 1..=8usize {
        let name = format!("permutations of [{n}] by number of cycles = s({n}, k)");
        out.push(match SymmetricGroupTally::new(n) {
            Ok(t) => {
                let counts: Vec<Value> = t.by_cycle_count()[1..]
                    .iter()
                    .map(|&c| Value::String(c.to_string()))
                    .collect();
                let want: Vec<Value> = (1..=n)
                    .map(|k| nat(&stirling1_unsigned(n, k).expect("1 <= k <= n")))
                    .collect();
                Check::exact(name, counts.into(), want.into())
            }
            Err(e) => failed(name, e),
        });
    }
}
