//! Nested Monte Carlo estimates of `Λ_π` on signed Brownian excursions.

use rayon::prelude::*;

use super::stats::summarize;
use super::{task_rng, ExperimentReport, Reference};
use crate::distribution::DistributionFunction;
use crate::error::{Error, Result};
use crate::excursion::{assign_signs, pr_perm_counts, sample_brownian_excursion, MatchCounts};
use crate::moments::{expectation_lambda, moment_lambda};
use crate::perm::Permutation;
use crate::rational::to_f64;

/// Largest pattern size for which exact reference moments are computed.
const REFERENCE_MAX_SIZE: usize = 4;

#[derive(Clone, Debug, PartialEq)]
pub struct LambdaConfig {
    pub excursions: usize,
    /// Grid steps of each discretized excursion.
    pub grid: usize,
    pub points_per_excursion: u64,
    pub seed: u64,
    pub mean_tolerance: f64,
    pub second_moment_tolerance: f64,
}

impl Default for LambdaConfig {
    fn default() -> Self {
        Self {
            excursions: 500,
            grid: 1 << 12,
            points_per_excursion: 10_000,
            seed: 0,
            mean_tolerance: 0.02,
            second_moment_tolerance: 0.01,
        }
    }
}

#[derive(Clone, Debug)]
pub struct LambdaEstimate {
    /// Per-excursion match counts, in task order.
    pub counts: Vec<MatchCounts>,
    pub report: ExperimentReport,
}

impl LambdaEstimate {
    /// Per-excursion estimates of `Λ_π`.
    pub fn samples(&self) -> Vec<f64> {
        self.counts.iter().map(MatchCounts::estimate).collect()
    }
}

/// Samples signed excursions, and for each one the fraction of `|π|`-point
/// draws whose extracted permutation is `π`.
///
/// The second moment uses `h(h-1) / (T(T-1))` per excursion, which is
/// unbiased for `E[Λ_π²]` despite the finite inner sample.
pub fn lambda_estimate(pattern: &Permutation, cfg: &LambdaConfig) -> Result<LambdaEstimate> {
    if cfg.excursions == 0 || cfg.points_per_excursion < 2 {
        return Err(Error::InvalidArgument(
            "need at least one excursion and two points per excursion".into(),
        ));
    }
    let counts = (0..cfg.excursions)
        .into_par_iter()
        .map(|i| {
            let mut rng = task_rng(cfg.seed, i as u64);
            let f = sample_brownian_excursion(cfg.grid, &mut rng)?;
            let s = assign_signs(f, &mut rng);
            pr_perm_counts(
                pattern,
                &s,
                &DistributionFunction::Uniform,
                cfg.points_per_excursion,
                &mut rng,
            )
        })
        .collect::<Result<Vec<_>>>()?;

    let t = cfg.points_per_excursion as f64;
    let first: Vec<f64> = counts.iter().map(MatchCounts::estimate).collect();
    let second: Vec<f64> = counts
        .iter()
        .map(|c| c.hits as f64 * (c.hits as f64 - 1.0) / (t * (t - 1.0)))
        .collect();
    let (s1, s2) = (summarize(&first), summarize(&second));
    let trials: u64 = counts.iter().map(|c| c.trials).sum();
    let failures: u64 = counts.iter().map(|c| c.failures).sum();

    let mut report = ExperimentReport::new("lambda-estimate");
    report
        .param("pattern", pattern.to_string())
        .param("excursions", cfg.excursions)
        .param("grid", cfg.grid)
        .param("points_per_excursion", cfg.points_per_excursion)
        .param("seed", cfg.seed);

    let (ref1, ref2) = if pattern.size() <= REFERENCE_MAX_SIZE {
        (
            Some(expectation_lambda(pattern)),
            Some(moment_lambda(pattern, 2)?),
        )
    } else {
        (None, None)
    };
    report.estimate(
        "mean",
        s1.mean,
        Some(s1.std_error),
        ref1.as_ref().map(|q| Reference::exact(q, "exact expectation")),
    );
    report.estimate(
        "second_moment",
        s2.mean,
        Some(s2.std_error),
        ref2.as_ref().map(|q| Reference::exact(q, "exact second moment")),
    );
    report.estimate("variance", s2.mean - s1.mean * s1.mean, None, None);
    report.estimate(
        "condition_failure_rate",
        failures as f64 / trials as f64,
        None,
        None,
    );
    if let Some(q) = &ref1 {
        let d = (s1.mean - to_f64(q)).abs();
        report.check(
            "mean",
            d < cfg.mean_tolerance,
            format!("|{:.5} - {:.5}| = {d:.5} (tolerance {})", s1.mean, to_f64(q), cfg.mean_tolerance),
            None,
        );
    }
    if let Some(q) = &ref2 {
        let d = (s2.mean - to_f64(q)).abs();
        report.check(
            "second_moment",
            d < cfg.second_moment_tolerance,
            format!(
                "|{:.5} - {:.5}| = {d:.5} (tolerance {})",
                s2.mean,
                to_f64(q),
                cfg.second_moment_tolerance
            ),
            None,
        );
    }
    if !pattern.is_separable() {
        let all_zero = counts.iter().all(|c| c.hits == 0);
        report.check(
            "non_separable_never_extracted",
            all_zero,
            "extraction only produces separable permutations",
            None,
        );
    }
    Ok(LambdaEstimate { counts, report })
}
