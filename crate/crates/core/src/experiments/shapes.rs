//! Shapes, signs and leaf positions of uniform Schröder trees.

use rand::Rng;
use rayon::prelude::*;

use super::stats::{chi_square_gof, chi_square_homogeneity, median, summarize};
use super::{task_rng, ExperimentReport, Reference, ALPHA};
use crate::error::{Error, Result};
use crate::moments::catalan;
use crate::perm::sample_sorted_subset;
use crate::rational::{ratio, to_f64, Rational};
use crate::sampler::sample_schroder_tree;
use crate::tree::{all_binary_trees, all_trees, SchroderTree, Sign, SignedTree};

/// Smallest expected count per cell for a chi-square test to be run.
const MIN_EXPECTED: f64 = 5.0;

#[derive(Clone, Debug, PartialEq)]
pub struct ShapeConfig {
    pub n: usize,
    /// Number of sampled trees.
    pub trials: usize,
    /// Leaf subsets drawn from each tree.
    pub subsets_per_tree: usize,
    pub seed: u64,
}

impl Default for ShapeConfig {
    fn default() -> Self {
        Self {
            n: 10_000,
            trials: 10_000,
            subsets_per_tree: 1,
            seed: 0,
        }
    }
}

fn validate(cfg: &ShapeConfig, k: usize) -> Result<()> {
    if cfg.trials == 0 || cfg.subsets_per_tree == 0 {
        return Err(Error::InvalidArgument("trials must be positive".into()));
    }
    if k > cfg.n {
        return Err(Error::SizeMismatch {
            patterns: k,
            target: cfg.n,
        });
    }
    Ok(())
}

/// Uniform `k`-subset of the leaves `1..=n`, sorted.
fn leaf_subset<R: Rng + ?Sized>(rng: &mut R, n: usize, k: usize) -> Vec<usize> {
    let mut c = vec![0usize; k];
    sample_sorted_subset(rng, n, &mut c);
    c.iter_mut().for_each(|i| *i += 1);
    c
}

fn base_params(report: &mut ExperimentReport, cfg: &ShapeConfig, k: usize) {
    report
        .param("k", k)
        .param("n", cfg.n)
        .param("trials", cfg.trials)
        .param("subsets_per_tree", cfg.subsets_per_tree)
        .param("seed", cfg.seed);
}

/// Draws uniform trees with `n` leaves and uniform `k`-leaf subsets, and
/// tests that the induced shape is uniform over the `Cat_(k-1)` binary trees.
pub fn extracted_tree_uniformity(k: usize, cfg: &ShapeConfig) -> Result<ExperimentReport> {
    if !(2..=5).contains(&k) {
        return Err(Error::InvalidArgument("k must be in 2..=5".into()));
    }
    validate(cfg, k)?;
    let shapes = all_binary_trees(k);
    let per_tree: Vec<Vec<Option<usize>>> = (0..cfg.trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = task_rng(cfg.seed, i as u64);
            let t = sample_schroder_tree(cfg.n, &mut rng)?;
            (0..cfg.subsets_per_tree)
                .map(|_| {
                    let sub = t.induced_subtree(&leaf_subset(&mut rng, cfg.n, k))?;
                    Ok(shapes.iter().position(|s| *s == sub))
                })
                .collect()
        })
        .collect::<Result<_>>()?;

    let mut counts = vec![0u64; shapes.len()];
    let mut non_binary = 0u64;
    for hit in per_tree.iter().flatten() {
        match hit {
            Some(j) => counts[*j] += 1,
            None => non_binary += 1,
        }
    }
    let draws = (cfg.trials * cfg.subsets_per_tree) as f64;
    let binary: u64 = counts.iter().sum();
    let mut report = ExperimentReport::new("tree-uniformity");
    base_params(&mut report, cfg, k);
    let p = ratio(1u32, catalan(k - 1));
    for (s, &c) in shapes.iter().zip(&counts) {
        let f = c as f64 / binary.max(1) as f64;
        let se = (f * (1.0 - f) / binary.max(1) as f64).sqrt();
        report.estimate(
            &format!("shape {s}"),
            f,
            Some(se),
            Some(Reference::exact(&p, "uniform binary shape")),
        );
    }
    report.estimate("non_binary_rate", non_binary as f64 / draws, None, None);
    let expected = vec![to_f64(&p); shapes.len()];
    let chi = chi_square_gof(&counts, &expected);
    report.check(
        "uniform_binary_shapes",
        chi.passes(ALPHA),
        format!("chi-square {:.3} on {} df", chi.statistic, chi.df),
        Some(chi.p_value),
    );
    report.note(format!(
        "{non_binary} of {draws} induced subtrees were not binary"
    ));
    Ok(report)
}

/// Sign pattern of the internal vertices of a signed tree, in preorder, as
/// bits with `1` for `-`.
fn sign_code(t: &SignedTree) -> usize {
    t.signs()
        .iter()
        .flatten()
        .enumerate()
        .map(|(i, s)| usize::from(*s == Sign::Minus) << i)
        .sum()
}

/// Draws uniform trees with alternating signs and a fair root sign, keeps the
/// `k`-leaf subsets whose induced shape is `t0`, and tests that the induced
/// signs are uniform over the `2^(k-1)` patterns. For `k >= 3` it also tests
/// that the height parities of the first two branch points are independent.
pub fn sign_balance_test(t0: &SchroderTree, cfg: &ShapeConfig) -> Result<ExperimentReport> {
    let k = t0.size();
    if !t0.is_binary() || !(2..=4).contains(&k) {
        return Err(Error::InvalidArgument(
            "target shape must be binary with 2 to 4 leaves".into(),
        ));
    }
    validate(cfg, k)?;
    let cells = 1usize << (k - 1);
    // Each hit: sign code and the parities of the first two branch points.
    let per_tree: Vec<Vec<(usize, [u32; 2])>> = (0..cfg.trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = task_rng(cfg.seed, i as u64);
            let t = sample_schroder_tree(cfg.n, &mut rng)?;
            let root = if rng.random::<bool>() { Sign::Plus } else { Sign::Minus };
            let depth = t.depths();
            let st = SignedTree::alternating(t, root);
            let mut hits = Vec::new();
            for _ in 0..cfg.subsets_per_tree {
                let leaves = leaf_subset(&mut rng, cfg.n, k);
                let (arity, origin) = st.tree().induced_parts(&leaves)?;
                if arity != t0.arities() {
                    continue;
                }
                let sub = st.induced_subtree(&leaves)?;
                let mut branch = origin
                    .iter()
                    .zip(&arity)
                    .filter(|(_, &a)| a > 0)
                    .map(|(&v, _)| depth[v] % 2);
                let parities = [branch.next().unwrap_or(0), branch.next().unwrap_or(0)];
                hits.push((sign_code(&sub), parities));
            }
            Ok(hits)
        })
        .collect::<Result<_>>()?;

    let mut counts = vec![0u64; cells];
    let mut parity = [[0u64; 2]; 2];
    for &(code, [a, b]) in per_tree.iter().flatten() {
        counts[code] += 1;
        parity[a as usize][b as usize] += 1;
    }
    let hits: u64 = counts.iter().sum();
    let mut report = ExperimentReport::new("sign-balance");
    base_params(&mut report, cfg, k);
    report.param("shape", t0.to_string());
    report.estimate(
        "conditioning_rate",
        hits as f64 / (cfg.trials * cfg.subsets_per_tree) as f64,
        None,
        None,
    );
    let p = ratio(1u32, cells as u32);
    for (code, &c) in counts.iter().enumerate() {
        let pattern: String = (0..k - 1)
            .map(|i| if code >> i & 1 == 1 { '-' } else { '+' })
            .collect();
        let f = c as f64 / hits.max(1) as f64;
        report.estimate(
            &format!("signs {pattern}"),
            f,
            Some((f * (1.0 - f) / hits.max(1) as f64).sqrt()),
            Some(Reference::exact(&p, "balanced signs")),
        );
    }
    if (hits as f64) < MIN_EXPECTED * cells as f64 {
        report.note(format!(
            "only {hits} subsets induced the target shape; sign test skipped"
        ));
        return Ok(report);
    }
    let chi = chi_square_gof(&counts, &vec![to_f64(&p); cells]);
    report.check(
        "balanced_signs",
        chi.passes(ALPHA),
        format!("chi-square {:.3} on {} df", chi.statistic, chi.df),
        Some(chi.p_value),
    );
    if k >= 3 {
        let h = chi_square_homogeneity(&[&parity[0], &parity[1]]);
        let min_cell = parity.iter().flatten().min().copied().unwrap_or(0);
        if (min_cell as f64) < MIN_EXPECTED {
            report.note("parity table too sparse; independence test skipped");
        } else {
            report.check(
                "independent_parities",
                h.passes(ALPHA),
                format!(
                    "parity table {:?}, chi-square {:.3} on {} df",
                    parity, h.statistic, h.df
                ),
                Some(h.p_value),
            );
        }
    }
    Ok(report)
}

/// Exhaustive sign statistics for two leaves over every Schröder tree of
/// size `n`: the probability that the common ancestor carries `+` under a
/// fair root sign, and the probability that it sits at even height. The
/// second is the probability of `+` when the root sign is fixed to `+`.
pub fn sign_balance_exact(n: usize) -> Result<ExperimentReport> {
    if !(2..=9).contains(&n) {
        return Err(Error::InvalidArgument("size must be in 2..=9".into()));
    }
    let mut even = 0u64;
    let mut total = 0u64;
    for t in all_trees(n) {
        let depth = t.depths();
        for i in 1..n {
            for j in i + 1..=n {
                let v = t.common_ancestor(i, j)?;
                total += 1;
                if depth[v] % 2 == 0 {
                    even += 1;
                }
            }
        }
    }
    let p_even = ratio(even, total);
    // A fair root sign makes + and - symmetric whatever the height.
    let p_plus: Rational = ratio(1u32, 2u32);
    let mut report = ExperimentReport::new("sign-balance-exact");
    report.param("n", n).param("k", 2);
    report.estimate(
        "p_plus",
        to_f64(&p_plus),
        None,
        Some(Reference::exact(&p_plus, "balanced signs")),
    );
    report.estimate(
        "p_even_height",
        to_f64(&p_even),
        None,
        Some(Reference::exact(&ratio(1u32, 2u32), "asymptotic parity balance")),
    );
    report.note(format!(
        "exact probability of even height: {}",
        crate::rational::format_fraction(&p_even)
    ));
    Ok(report)
}

/// For each `n` in `ns`, samples trees and computes `sup |F_T(x) - x|`; checks
/// that the median strictly decreases along `ns`.
pub fn leaf_uniformity_stat(ns: &[usize], trials: usize, seed: u64) -> Result<ExperimentReport> {
    if ns.is_empty() || trials == 0 || ns.iter().any(|&n| n < 2) {
        return Err(Error::InvalidArgument(
            "need sizes of at least 2 and a positive number of trials".into(),
        ));
    }
    let mut report = ExperimentReport::new("leaf-uniformity");
    report
        .param("sizes", ns.to_vec())
        .param("trials", trials)
        .param("seed", seed);
    let mut medians = Vec::with_capacity(ns.len());
    for (level, &n) in ns.iter().enumerate() {
        let stats = (0..trials)
            .into_par_iter()
            .map(|i| {
                let mut rng = task_rng(seed, ((level as u64) << 32) | i as u64);
                let t = sample_schroder_tree(n, &mut rng)?;
                Ok(t.leaf_cdf()?.sup_deviation_from_uniform())
            })
            .collect::<Result<Vec<f64>>>()?;
        let s = summarize(&stats);
        let med = median(&stats);
        report.estimate(&format!("median_n{n}"), med, None, None);
        report.estimate(&format!("mean_n{n}"), s.mean, Some(s.std_error), None);
        report.estimate(&format!("max_n{n}"), s.max, None, None);
        report.check(
            &format!("in_unit_interval_n{n}"),
            s.min >= 0.0 && s.max <= 1.0,
            format!("range [{:.4}, {:.4}]", s.min, s.max),
            None,
        );
        medians.push(med);
    }
    if medians.len() > 1 {
        report.check(
            "median_decreasing",
            medians.windows(2).all(|w| w[1] < w[0]),
            medians
                .iter()
                .map(|m| format!("{m:.5}"))
                .collect::<Vec<_>>()
                .join(" > "),
            None,
        );
    }
    Ok(report)
}
