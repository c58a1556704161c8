//! Sampling from the Ewens measure `P_{n;θ}` and Monte Carlo estimation of
//! cycle-count statistics.
//!
//! Permutations are grown by sequential insertion: element `i` opens a new
//! cycle with probability `θ / (θ + i - 1)` and is otherwise placed right
//! after a uniformly chosen earlier element. The cycle-count sampler replays
//! exactly the same random decisions but tracks only cycle sizes, so for a
//! given seed and replicate it returns the cycle type of the permutation the
//! full sampler would have produced.
//!
//! Replicate `r` draws from ChaCha8 stream `r` under the configured seed, so
//! parallel runs are reproducible bit for bit.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::perm::Permutation;
use crate::scalar::CompensatedSum;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplerConfig {
    pub n: usize,
    pub theta: f64,
    pub seed: u64,
    pub replicates: usize,
}

impl SamplerConfig {
    pub fn new(n: usize, theta: f64, seed: u64, replicates: usize) -> Result<Self> {
        let cfg = Self {
            n,
            theta,
            seed,
            replicates,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return domain("sampler needs n >= 1");
        }
        if !(self.theta > 0.0 && self.theta.is_finite()) {
            return domain(format!("theta must be positive and finite, got {}", self.theta));
        }
        if self.replicates == 0 {
            return domain("sampler needs at least one replicate");
        }
        Ok(())
    }

    fn rng(&self, replicate: usize) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(replicate as u64);
        rng
    }
}

/// One decision of the insertion process (0-based elements).
#[derive(Debug, Clone, Copy)]
enum Step {
    /// Element `i` opens a new cycle.
    Open(usize),
    /// Element `i` is inserted right after the earlier element `j`.
    Join(usize, usize),
}

fn insertion_pass<R: Rng>(rng: &mut R, n: usize, theta: f64, mut visit: impl FnMut(Step)) {
    for i in 0..n {
        if i == 0 || rng.random::<f64>() < theta / (theta + i as f64) {
            visit(Step::Open(i));
        } else {
            visit(Step::Join(i, rng.random_range(0..i)));
        }
    }
}

/// Draws the permutation of replicate `replicate`.
pub fn sample_permutation_replicate(cfg: &SamplerConfig, replicate: usize) -> Permutation {
    let mut rng = cfg.rng(replicate);
    let mut images = vec![0usize; cfg.n];
    insertion_pass(&mut rng, cfg.n, cfg.theta, |step| match step {
        Step::Open(i) => images[i] = i,
        Step::Join(i, j) => {
            images[i] = images[j];
            images[j] = i;
        }
    });
    Permutation::from_zero_based_unchecked(images)
}

/// Draws one permutation from `P_{n;θ}` (replicate 0 of `cfg`).
pub fn sample_permutation(cfg: &SamplerConfig) -> Permutation {
    sample_permutation_replicate(cfg, 0)
}

/// Cycle counts `c_1, ..., c_{max_m}` of replicate `replicate`.
pub fn sample_cycle_counts_replicate(
    cfg: &SamplerConfig,
    replicate: usize,
    max_m: usize,
) -> Vec<u32> {
    let mut rng = cfg.rng(replicate);
    let mut cycle_of = vec![0u32; cfg.n];
    let mut sizes: Vec<u32> = Vec::new();
    insertion_pass(&mut rng, cfg.n, cfg.theta, |step| match step {
        Step::Open(i) => {
            cycle_of[i] = sizes.len() as u32;
            sizes.push(1);
        }
        Step::Join(i, j) => {
            let c = cycle_of[j];
            cycle_of[i] = c;
            sizes[c as usize] += 1;
        }
    });
    let mut counts = vec![0u32; max_m];
    for s in sizes {
        if (s as usize) <= max_m {
            counts[s as usize - 1] += 1;
        }
    }
    counts
}

fn check_max_m(cfg: &SamplerConfig, max_m: usize) -> Result<()> {
    cfg.validate()?;
    if max_m == 0 || max_m > cfg.n {
        return domain(format!("max_m must lie in 1..={}, got {max_m}", cfg.n));
    }
    Ok(())
}

/// Cycle counts `c_1, ..., c_{max_m}` of one draw (replicate 0 of `cfg`).
pub fn sample_cycle_counts(cfg: &SamplerConfig, max_m: usize) -> Result<Vec<u32>> {
    check_max_m(cfg, max_m)?;
    Ok(sample_cycle_counts_replicate(cfg, 0, max_m))
}

/// Cycle counts for every replicate of `cfg`, in replicate order.
pub fn cycle_count_samples(cfg: &SamplerConfig, max_m: usize) -> Result<Vec<Vec<u32>>> {
    check_max_m(cfg, max_m)?;
    Ok((0..cfg.replicates)
        .into_par_iter()
        .map(|r| sample_cycle_counts_replicate(cfg, r, max_m))
        .collect())
}

/// How often each permutation appears among the replicates of `cfg`.
pub fn permutation_frequencies(cfg: &SamplerConfig) -> Result<BTreeMap<Permutation, u64>> {
    cfg.validate()?;
    let merged = (0..cfg.replicates)
        .into_par_iter()
        .fold(BTreeMap::new, |mut acc: BTreeMap<Permutation, u64>, r| {
            *acc.entry(sample_permutation_replicate(cfg, r)).or_default() += 1;
            acc
        })
        .reduce(BTreeMap::new, |mut a, b| {
            for (p, c) in b {
                *a.entry(p).or_default() += c;
            }
            a
        });
    Ok(merged)
}

/// Sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub estimate: f64,
    pub stderr: f64,
}

/// Result of [`mc_moment`]; serializes as `{estimate, stderr, replicates, seed}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloMoment {
    pub estimate: f64,
    pub stderr: f64,
    pub replicates: usize,
    pub seed: u64,
}

/// Mean and standard error (`sd / sqrt(R)`, with the `R - 1` variance).
///
/// Both passes use compensated summation over the values in order, so the
/// result depends only on the values, not on how they were produced.
pub fn mean_and_stderr(values: &[f64]) -> Estimate {
    let r = values.len() as f64;
    let mean = values.iter().copied().collect::<CompensatedSum<f64>>().value() / r;
    if values.len() < 2 {
        return Estimate {
            estimate: mean,
            stderr: 0.0,
        };
    }
    let ss = values
        .iter()
        .map(|v| (v - mean) * (v - mean))
        .collect::<CompensatedSum<f64>>()
        .value();
    Estimate {
        estimate: mean,
        stderr: (ss / (r - 1.0) / r).sqrt(),
    }
}

/// Sample covariance of paired observations, with the standard error of the
/// mean of centred products.
pub fn covariance(xs: &[f64], ys: &[f64]) -> Estimate {
    assert_eq!(xs.len(), ys.len());
    let mx = mean_and_stderr(xs).estimate;
    let my = mean_and_stderr(ys).estimate;
    let products: Vec<f64> = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).collect();
    mean_and_stderr(&products)
}

/// Empirical `P(c_m = j)` for `j = 0..=max_j`, each with its binomial
/// standard error.
pub fn empirical_pmf(samples: &[Vec<u32>], m: usize, max_j: u32) -> Vec<Estimate> {
    (0..=max_j)
        .map(|j| {
            let indicators: Vec<f64> = samples
                .iter()
                .map(|c| if c[m - 1] == j { 1.0 } else { 0.0 })
                .collect();
            mean_and_stderr(&indicators)
        })
        .collect()
}

/// Monte Carlo estimate of `E_{n;θ} prod_i c_{m_i}^{k_i}`.
pub fn mc_moment(cfg: &SamplerConfig, specs: &[(usize, u32)]) -> Result<MonteCarloMoment> {
    cfg.validate()?;
    if specs.is_empty() {
        return domain("mc_moment needs at least one (m, k) spec");
    }
    let max_m = specs.iter().map(|s| s.0).max().unwrap_or(1);
    if specs.iter().any(|&(m, _)| m == 0) {
        return domain("cycle lengths in specs must be >= 1");
    }
    let samples = cycle_count_samples(cfg, max_m)?;
    let values: Vec<f64> = samples
        .iter()
        .map(|c| {
            specs
                .iter()
                .map(|&(m, k)| f64::from(c[m - 1]).powi(k as i32))
                .product()
        })
        .collect();
    let Estimate { estimate, stderr } = mean_and_stderr(&values);
    Ok(MonteCarloMoment {
        estimate,
        stderr,
        replicates: cfg.replicates,
        seed: cfg.seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::cycle_type;

    #[test]
    fn config_validation() {
        assert!(SamplerConfig::new(0, 1.0, 1, 1).is_err());
        assert!(SamplerConfig::new(3, 0.0, 1, 1).is_err());
        assert!(SamplerConfig::new(3, f64::NAN, 1, 1).is_err());
        assert!(SamplerConfig::new(3, 1.0, 1, 0).is_err());
        let cfg = SamplerConfig::new(3, 1.0, 1, 1).unwrap();
        assert!(sample_cycle_counts(&cfg, 4).is_err());
    }

    #[test]
    fn single_element() {
        let cfg = SamplerConfig::new(1, 2.5, 9, 1).unwrap();
        assert_eq!(sample_permutation(&cfg), Permutation::identity(1));
        assert_eq!(sample_cycle_counts(&cfg, 1).unwrap(), vec![1]);
    }

    #[test]
    fn both_views_share_randomness() {
        let cfg = SamplerConfig::new(60, 1.7, 42, 200).unwrap();
        for r in 0..cfg.replicates {
            let p = sample_permutation_replicate(&cfg, r);
            let counts = sample_cycle_counts_replicate(&cfg, r, 60);
            let ct = cycle_type(&p);
            let want: Vec<u32> = ct.counts().iter().map(|&c| c as u32).collect();
            assert_eq!(counts, want);
        }
    }

    #[test]
    fn samples_are_valid_and_deterministic() {
        let cfg = SamplerConfig::new(200, 0.8, 7, 50).unwrap();
        let a = cycle_count_samples(&cfg, 200).unwrap();
        let b = cycle_count_samples(&cfg, 200).unwrap();
        assert_eq!(a, b);
        for c in &a {
            let total: usize = c.iter().enumerate().map(|(i, &x)| (i + 1) * x as usize).sum();
            assert_eq!(total, 200);
        }
        let other = SamplerConfig { seed: 8, ..cfg };
        assert_ne!(a, cycle_count_samples(&other, 200).unwrap());
    }

    #[test]
    fn moment_estimate_is_reproducible() {
        let cfg = SamplerConfig::new(100, 1.0, 3, 2000).unwrap();
        let a = mc_moment(&cfg, &[(1, 1)]).unwrap();
        let b = mc_moment(&cfg, &[(1, 1)]).unwrap();
        assert_eq!(a, b);
        assert!((a.estimate - 1.0).abs() < 4.0 * a.stderr);
        assert!(mc_moment(&cfg, &[(0, 1)]).is_err());
        assert!(mc_moment(&cfg, &[]).is_err());
    }

    #[test]
    fn summary_statistics() {
        let e = mean_and_stderr(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(e.estimate, 2.5);
        assert!((e.stderr - (5.0f64 / 3.0 / 4.0).sqrt()).abs() < 1e-15);
        let c = covariance(&[1.0, 2.0, 3.0], &[2.0, 4.0, 6.0]);
        assert!((c.estimate - 4.0 / 3.0).abs() < 1e-15);
    }
}
