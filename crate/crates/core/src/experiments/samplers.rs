//! Goodness-of-fit checks for the tree and permutation samplers.

use std::collections::HashMap;

use rayon::prelude::*;

use super::stats::{chi_square_gof, chi_square_homogeneity};
use super::{task_rng, ExperimentReport, ALPHA};
use crate::error::{Error, Result};
use crate::perm::{separable_permutations, Permutation};
use crate::sampler::{
    sample_gw_conditioned, sample_schroder_tree_cycle, sample_separable, shared_table,
};
use crate::tree::{all_trees, SchroderTree};

/// Draws handled by one random stream.
const CHUNK: usize = 1000;

/// Tallies `draws` outcomes of `draw` into `cells` bins, chunked so that
/// each chunk has its own stream.
fn tally<F>(draws: usize, cells: usize, seed: u64, draw: F) -> Result<Vec<u64>>
where
    F: Fn(&mut rand_chacha::ChaCha8Rng) -> Result<usize> + Sync,
{
    let chunks = draws.div_ceil(CHUNK);
    let partial = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = task_rng(seed, c as u64);
            let mut counts = vec![0u64; cells];
            for _ in 0..CHUNK.min(draws - c * CHUNK) {
                counts[draw(&mut rng)?] += 1;
            }
            Ok(counts)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut counts = vec![0u64; cells];
    for p in partial {
        counts.iter_mut().zip(p).for_each(|(a, b)| *a += b);
    }
    Ok(counts)
}

fn validate(n: usize, draws: usize) -> Result<()> {
    if !(1..=7).contains(&n) || draws == 0 {
        return Err(Error::InvalidArgument(
            "size must be in 1..=7 and draws positive".into(),
        ));
    }
    Ok(())
}

/// Chi-square test of `sample_separable(n)` against the uniform law on the
/// separable permutations of size `n`.
pub fn separable_uniformity(n: usize, draws: usize, seed: u64) -> Result<ExperimentReport> {
    validate(n, draws)?;
    let all = separable_permutations(n);
    let index: HashMap<Permutation, usize> =
        all.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect();
    let counts = tally(draws, all.len(), seed, |rng| {
        let p = sample_separable(n, rng)?;
        index
            .get(&p)
            .copied()
            .ok_or_else(|| Error::InvalidPermutation(format!("{p} is not separable")))
    })?;
    let chi = chi_square_gof(&counts, &vec![1.0 / all.len() as f64; all.len()]);
    let mut report = ExperimentReport::new("separable-uniformity");
    report
        .param("n", n)
        .param("draws", draws)
        .param("seed", seed)
        .param("support", all.len());
    report.check(
        "uniform",
        chi.passes(ALPHA),
        format!("chi-square {:.3} on {} df", chi.statistic, chi.df),
        Some(chi.p_value),
    );
    Ok(report)
}

/// Homogeneity test between the counting, conditioned Galton-Watson and
/// cycle-lemma tree samplers at size `n`, plus a fit of each to the uniform
/// law on Schröder trees.
pub fn sampler_agreement(n: usize, draws: usize, seed: u64) -> Result<ExperimentReport> {
    validate(n, draws)?;
    let trees = all_trees(n);
    let index: HashMap<SchroderTree, usize> =
        trees.iter().cloned().enumerate().map(|(i, t)| (t, i)).collect();
    let lookup = |t: SchroderTree| -> Result<usize> {
        index
            .get(&t)
            .copied()
            .ok_or_else(|| Error::InvalidTree(format!("{t} has the wrong size")))
    };
    let table = shared_table();
    let cells = trees.len();
    let counting = tally(draws, cells, seed, |rng| lookup(table.sample(n, rng)?))?;
    let gw = tally(draws, cells, seed ^ 0x9e37_79b9_7f4a_7c15, |rng| {
        lookup(sample_gw_conditioned(n, rng, 1 << 20)?.tree)
    })?;
    let cycle = tally(draws, cells, seed ^ 0x6a09_e667_f3bc_c908, |rng| {
        lookup(sample_schroder_tree_cycle(n, rng)?)
    })?;

    let mut report = ExperimentReport::new("sampler-agreement");
    report
        .param("n", n)
        .param("draws", draws)
        .param("seed", seed)
        .param("support", cells);
    let uniform = vec![1.0 / cells as f64; cells];
    for (name, counts) in [("counting", &counting), ("gw", &gw), ("cycle", &cycle)] {
        let chi = chi_square_gof(counts, &uniform);
        report.check(
            &format!("{name}_uniform"),
            chi.passes(ALPHA),
            format!("chi-square {:.3} on {} df", chi.statistic, chi.df),
            Some(chi.p_value),
        );
    }
    let h = chi_square_homogeneity(&[&counting, &gw, &cycle]);
    report.check(
        "samplers_agree",
        h.passes(ALPHA),
        format!("chi-square {:.3} on {} df", h.statistic, h.df),
        Some(h.p_value),
    );
    Ok(report)
}
