//! Pattern densities in uniform separable permutations.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use rayon::prelude::*;

use super::stats::summarize;
use super::{task_rng, ExperimentReport, Reference};
use crate::error::{Error, Result};
use crate::moments::{expectation_lambda, rho_counts, variance_lambda};
use crate::perm::{occ_exact, occ_sample, pattern_counts, separable_permutations, Permutation};
use crate::rational::{binomial, format_fraction, multinomial, ratio, to_f64, Rational};
use crate::sampler::sample_separable;

const REFERENCE_MAX_SIZE: usize = 4;

#[derive(Clone, Debug, PartialEq)]
pub struct OccConfig {
    pub n: usize,
    pub perms: usize,
    /// Random subsets drawn per permutation.
    pub occ_trials: u64,
    pub seed: u64,
    pub mean_tolerance: f64,
    /// Relative tolerance on the variance; `None` skips the check.
    pub variance_tolerance: Option<f64>,
}

impl Default for OccConfig {
    fn default() -> Self {
        Self {
            n: 100_000,
            perms: 200,
            occ_trials: 10_000,
            seed: 0,
            mean_tolerance: 0.02,
            variance_tolerance: None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct OccDistribution {
    /// Per-permutation density estimates, in task order.
    pub samples: Vec<f64>,
    pub report: ExperimentReport,
}

/// Samples uniform separable permutations of size `n` and estimates the
/// density of `π` in each.
///
/// The reported variance subtracts the binomial noise of the inner estimate,
/// `p(1-p)/(T-1)` averaged over permutations.
pub fn occ_distribution(pattern: &Permutation, cfg: &OccConfig) -> Result<OccDistribution> {
    if cfg.perms == 0 || cfg.occ_trials < 2 {
        return Err(Error::InvalidArgument(
            "need at least one permutation and two subsets per permutation".into(),
        ));
    }
    if pattern.size() > cfg.n {
        return Err(Error::SizeMismatch {
            patterns: pattern.size(),
            target: cfg.n,
        });
    }
    let samples = (0..cfg.perms)
        .into_par_iter()
        .map(|i| {
            let mut rng = task_rng(cfg.seed, i as u64);
            let sigma = sample_separable(cfg.n, &mut rng)?;
            occ_sample(pattern, &sigma, cfg.occ_trials, &mut rng)
        })
        .collect::<Result<Vec<f64>>>()?;

    let s = summarize(&samples);
    let t = cfg.occ_trials as f64;
    let noise = samples.iter().map(|p| p * (1.0 - p)).sum::<f64>() / samples.len() as f64 / (t - 1.0);
    let variance = s.variance - noise;

    let mut report = ExperimentReport::new("occ-distribution");
    report
        .param("pattern", pattern.to_string())
        .param("n", cfg.n)
        .param("perms", cfg.perms)
        .param("occ_trials", cfg.occ_trials)
        .param("seed", cfg.seed);
    let small = pattern.size() <= REFERENCE_MAX_SIZE;
    let mean_ref = small.then(|| expectation_lambda(pattern));
    let var_ref = if small {
        Some(variance_lambda(pattern)?)
    } else {
        None
    };
    report.estimate(
        "mean",
        s.mean,
        Some(s.std_error),
        mean_ref.as_ref().map(|q| Reference::exact(q, "limit expectation")),
    );
    report.estimate(
        "variance",
        variance,
        None,
        var_ref.as_ref().map(|q| Reference::exact(q, "limit variance")),
    );
    if let Some(q) = &mean_ref {
        let d = (s.mean - to_f64(q)).abs();
        report.check(
            "mean",
            d < cfg.mean_tolerance,
            format!("|{:.5} - {}| = {d:.5} (tolerance {})", s.mean, format_fraction(q), cfg.mean_tolerance),
            None,
        );
    }
    if let (Some(q), Some(tol)) = (&var_ref, cfg.variance_tolerance) {
        let v = to_f64(q);
        let rel = (variance - v).abs() / v;
        report.check(
            "variance",
            rel < tol,
            format!("relative error {rel:.3} against {} (tolerance {tol})", format_fraction(q)),
            None,
        );
    }
    report.note("limit values are reached only as n grows; tolerances are empirical");
    Ok(OccDistribution { samples, report })
}

/// Exact average of `occ(π, σ)` over all separable `σ` of size `n`.
pub fn occ_exhaustive_mean(pattern: &Permutation, n: usize) -> Result<Rational> {
    if n == 0 || n > 10 {
        return Err(Error::InvalidArgument("exhaustive size must be in 1..=10".into()));
    }
    let all = separable_permutations(n);
    let total = all
        .iter()
        .fold(Rational::zero(), |acc, s| acc + occ_exact(pattern, s));
    Ok(total / Rational::from_integer(BigInt::from(all.len())))
}

/// Exact `max_σ |Π occ(π_i, σ) - Σ_ρ c^ρ occ(ρ, σ)|` over separable `σ` of
/// each size in `ns`, with a check that it strictly decreases along `ns`.
pub fn discrete_moment_identity_check(
    patterns: &[Permutation],
    ns: &[usize],
) -> Result<ExperimentReport> {
    if patterns.is_empty() {
        return Err(Error::InvalidArgument("at least one pattern needed".into()));
    }
    let sizes: Vec<usize> = patterns.iter().map(Permutation::size).collect();
    let k: usize = sizes.iter().sum();
    if k > 6 {
        return Err(Error::InvalidArgument("total pattern size above 6".into()));
    }
    if let Some(&n) = ns.iter().find(|&&n| n < k || n > 8) {
        return Err(Error::InvalidArgument(format!(
            "size {n} outside {k}..=8"
        )));
    }
    let m = Rational::from_integer(BigInt::from(multinomial(&sizes)));
    let coeffs: Vec<(usize, Rational)> = rho_counts(patterns, &sizes, k)
        .into_iter()
        .map(|(rank, d)| (rank as usize, ratio(d, 1u32) / &m))
        .collect();

    let mut report = ExperimentReport::new("discrete-moment-identity");
    report.param(
        "patterns",
        patterns.iter().map(|p| p.to_string()).collect::<Vec<_>>(),
    );
    report.param("sizes", ns.to_vec());
    let mut maxima = Vec::with_capacity(ns.len());
    for &n in ns {
        let subsets = Rational::from_integer(BigInt::from(binomial(n as u64, k as u64)));
        let worst = separable_permutations(n)
            .par_iter()
            .map(|sigma| {
                let product = patterns
                    .iter()
                    .fold(Rational::from_integer(1.into()), |acc, p| acc * occ_exact(p, sigma));
                let counts = pattern_counts(sigma, k);
                let mixed = coeffs.iter().fold(Rational::zero(), |acc, (rank, c)| {
                    acc + c * ratio(counts[*rank], 1u32)
                }) / &subsets;
                (product - mixed).abs()
            })
            .reduce(Rational::zero, |a, b| if b > a { b } else { a });
        report.estimate(
            &format!("max_deviation_n{n}"),
            to_f64(&worst),
            None,
            None,
        );
        report.note(format!("n = {n}: max deviation {}", format_fraction(&worst)));
        maxima.push(worst);
    }
    if maxima.len() > 1 {
        let decreasing = maxima.windows(2).all(|w| w[1] < w[0]);
        report.check(
            "decreasing",
            decreasing,
            maxima.iter().map(format_fraction).collect::<Vec<_>>().join(" > "),
            None,
        );
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Permutation {
        Permutation::parse_pattern(s).unwrap()
    }

    #[test]
    fn exhaustive_mean_of_12_is_half() {
        for n in 2..=7 {
            assert_eq!(occ_exhaustive_mean(&p("12"), n).unwrap(), ratio(1, 2));
        }
    }

    #[test]
    fn exhaustive_mean_against_direct_sum() {
        // Every permutation of size 3 is separable and only 123 contains 123.
        assert_eq!(occ_exhaustive_mean(&p("123"), 3).unwrap(), ratio(1, 6));
    }

    #[test]
    fn single_pattern_identity_is_exact() {
        let r = discrete_moment_identity_check(&[p("132")], &[4, 5]).unwrap();
        for e in &r.estimates {
            assert_eq!(e.value, 0.0);
        }
    }

    #[test]
    fn product_identity_shrinks() {
        let r = discrete_moment_identity_check(&[p("12"), p("12")], &[4, 5, 6]).unwrap();
        assert!(r.find_estimate("max_deviation_n4").unwrap().value <= 1.0);
        assert!(r.find_check("decreasing").unwrap().passed);
    }

    #[test]
    fn identity_rejects_bad_sizes() {
        assert!(discrete_moment_identity_check(&[p("123"), p("1234")], &[8]).is_err());
        assert!(discrete_moment_identity_check(&[p("12")], &[9]).is_err());
        assert!(discrete_moment_identity_check(&[p("123")], &[2]).is_err());
    }

    #[test]
    fn small_occ_distribution() {
        let cfg = OccConfig {
            n: 50,
            perms: 30,
            occ_trials: 200,
            seed: 4,
            ..OccConfig::default()
        };
        let a = occ_distribution(&p("12"), &cfg).unwrap();
        let b = occ_distribution(&p("12"), &cfg).unwrap();
        assert_eq!(a.samples, b.samples);
        assert_eq!(a.samples.len(), 30);
        assert_eq!(a.report.find_estimate("mean").unwrap().reference.as_ref().unwrap().exact, "1/2");
    }
}
