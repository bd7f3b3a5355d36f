//! Exact limit moments of pattern densities.

use std::collections::HashMap;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::perm::{lex_rank_of, Permutation};
use crate::rational::{binomial, multinomial, rational_from_uints, Rational};
use crate::tree::decomposition_tree;

/// Default cap on the number of (position, value) partition pairs enumerated
/// by [`joint_moment`].
pub const DEFAULT_PAIR_BUDGET: u128 = 10_000_000;

/// `Cat_k = C(2k, k) / (k + 1)`.
pub fn catalan(k: usize) -> BigUint {
    binomial(2 * k as u64, k as u64) / (k as u64 + 1)
}

/// Catalan numbers `Cat_0, ..., Cat_max`.
pub fn catalan_table(max: usize) -> Vec<BigUint> {
    (0..=max).map(catalan).collect()
}

/// Number of signed binary trees whose permutation is `pattern`: the product
/// of `Cat_{deg(v)-1}` over the internal vertices of its decomposition tree,
/// or 0 when the pattern is not separable.
pub fn n_pi(pattern: &Permutation) -> BigUint {
    let Ok(d) = decomposition_tree(pattern) else {
        return BigUint::zero();
    };
    let t = d.tree();
    (0..t.vertex_count())
        .filter(|&v| !t.is_leaf(v))
        .map(|v| catalan(t.arity(v) - 1))
        .product()
}

/// `E[Λ_π] = N_π / (2^(k-1) Cat_(k-1))` with `k = |π|`.
pub fn expectation_lambda(pattern: &Permutation) -> Rational {
    let k = pattern.size();
    let den = catalan(k - 1) << (k - 1);
    rational_from_uints(&n_pi(pattern), &den)
}

fn check_sizes(target: usize, patterns: &[Permutation]) -> Result<usize> {
    if patterns.is_empty() {
        return Err(Error::InvalidArgument("at least one pattern needed".into()));
    }
    let total: usize = patterns.iter().map(Permutation::size).sum();
    if total != target {
        return Err(Error::SizeMismatch {
            patterns: total,
            target,
        });
    }
    Ok(total)
}

/// `c^ρ_{π_1..π_r}`: the proportion of ordered set-partitions `(I_1..I_r)` of
/// the positions of `ρ` with `|I_i| = |π_i|` and `pat_{I_i}(ρ) = π_i`.
pub fn c_coeff(rho: &Permutation, patterns: &[Permutation]) -> Result<Rational> {
    check_sizes(rho.size(), patterns)?;
    let sizes: Vec<usize> = patterns.iter().map(Permutation::size).collect();
    let mut count = 0u64;
    for_each_labelling(&sizes, |labels| {
        let blocks = blocks_of(labels, patterns.len());
        if blocks
            .iter()
            .zip(patterns)
            .all(|(idx, pi)| rho.pattern_at(idx).as_ref() == Ok(pi))
        {
            count += 1;
        }
    });
    Ok(rational_from_uints(
        &BigUint::from(count),
        &multinomial(&sizes),
    ))
}

/// 1-based members of each block of a labelling.
fn blocks_of(labels: &[u8], r: usize) -> Vec<Vec<usize>> {
    let mut blocks = vec![Vec::new(); r];
    for (i, &l) in labels.iter().enumerate() {
        blocks[l as usize].push(i + 1);
    }
    blocks
}

/// Calls `f` with every arrangement of the multiset `{i^(sizes[i])}`, which
/// encodes an ordered set-partition by the block label of each element.
fn for_each_labelling(sizes: &[usize], mut f: impl FnMut(&[u8])) {
    for labels in all_labellings(sizes) {
        f(&labels);
    }
}

fn all_labellings(sizes: &[usize]) -> Vec<Vec<u8>> {
    let mut labels: Vec<u8> = sizes
        .iter()
        .enumerate()
        .flat_map(|(i, &s)| std::iter::repeat_n(i as u8, s))
        .collect();
    let mut out = vec![labels.clone()];
    while next_arrangement(&mut labels) {
        out.push(labels.clone());
    }
    out
}

fn next_arrangement(v: &mut [u8]) -> bool {
    let Some(i) = v.windows(2).rposition(|w| w[0] < w[1]) else {
        return false;
    };
    let j = v.iter().rposition(|&x| x > v[i]).expect("pivot has a successor");
    v.swap(i, j);
    v[i + 1..].reverse();
    true
}

/// `E[Λ_π1 ... Λ_πr]` with the default pair budget.
pub fn joint_moment(patterns: &[Permutation]) -> Result<Rational> {
    joint_moment_with_budget(patterns, DEFAULT_PAIR_BUDGET)
}

/// `E[Λ_π1 ... Λ_πr] = Σ_ρ c^ρ E[Λ_ρ]`.
///
/// Every pair `(Pos, Val)` of ordered set-partitions of `[K]` with block
/// sizes `|π_i|` builds the permutation `ρ` that sends the `j`-th smallest
/// position of `Pos_i` to the `π_i(j)`-th smallest value of `Val_i`. Each `ρ`
/// arises from exactly `d^ρ = M c^ρ` pairs, `M` being the multinomial
/// coefficient, so the sum of `E[Λ_ρ]` over all pairs equals `M` times the
/// moment.
pub fn joint_moment_with_budget(patterns: &[Permutation], budget: u128) -> Result<Rational> {
    let k = check_sizes(patterns.iter().map(Permutation::size).sum(), patterns)?;
    let sizes: Vec<usize> = patterns.iter().map(Permutation::size).collect();
    let m = multinomial(&sizes);
    let pairs = &m * &m;
    let pairs_u128 = u128::try_from(&pairs).unwrap_or(u128::MAX);
    if pairs_u128 > budget {
        return Err(Error::BudgetExceeded {
            pairs: pairs_u128,
            budget,
        });
    }
    if k > 20 {
        return Err(Error::InvalidArgument("total pattern size above 20".into()));
    }
    let counts = rho_counts(patterns, &sizes, k);
    let mut expectations: HashMap<u64, Rational> = HashMap::new();
    let mut total = Rational::zero();
    for (rank, count) in counts {
        let e = expectations.entry(rank).or_insert_with(|| {
            let rho = Permutation::from_lex_rank(k, rank).expect("rank in range");
            expectation_lambda(&rho)
        });
        total += &*e * Rational::from_integer(BigInt::from(count));
    }
    Ok(total / Rational::from_integer(BigInt::from(m)))
}

/// Multiplicity of each `ρ` (by lexicographic rank) among all pairs.
pub(crate) fn rho_counts(patterns: &[Permutation], sizes: &[usize], k: usize) -> Vec<(u64, u64)> {
    let labellings = all_labellings(sizes);
    // For a value labelling, the value placed at the j-th position of block i.
    let value_maps: Vec<Vec<Vec<u32>>> = labellings
        .iter()
        .map(|lv| {
            blocks_of(lv, patterns.len())
                .iter()
                .zip(patterns)
                .map(|(vals, pi)| {
                    pi.values()
                        .iter()
                        .map(|&j| vals[j as usize - 1] as u32)
                        .collect()
                })
                .collect()
        })
        .collect();
    let merged: HashMap<u64, u64> = labellings
        .par_iter()
        .fold(HashMap::new, |mut acc: HashMap<u64, u64>, lp| {
            let positions = blocks_of(lp, patterns.len());
            let mut rho = vec![0u32; k];
            for vm in &value_maps {
                for (pos, vals) in positions.iter().zip(vm) {
                    for (&p, &v) in pos.iter().zip(vals) {
                        rho[p - 1] = v;
                    }
                }
                *acc.entry(lex_rank_of(&rho)).or_insert(0) += 1;
            }
            acc
        })
        .reduce(HashMap::new, |mut a, b| {
            for (key, c) in b {
                *a.entry(key).or_insert(0) += c;
            }
            a
        });
    let mut out: Vec<(u64, u64)> = merged.into_iter().collect();
    out.sort_unstable();
    out
}

/// `E[Λ_π^m]`.
pub fn moment_lambda(pattern: &Permutation, order: usize) -> Result<Rational> {
    if order == 0 {
        return Ok(Rational::one());
    }
    joint_moment(&vec![pattern.clone(); order])
}

/// `Var(Λ_π)`.
pub fn variance_lambda(pattern: &Permutation) -> Result<Rational> {
    let mean = expectation_lambda(pattern);
    Ok(moment_lambda(pattern, 2)? - &mean * &mean)
}

/// For `X` with the same law as `1 - X` and an odd order `m`, the moment
/// `E[X^m]` from `lower[j] = E[X^j]`, `j < m`.
pub fn odd_moment_by_symmetry(lower: &[Rational]) -> Result<Rational> {
    let m = lower.len();
    if m % 2 == 0 {
        return Err(Error::InvalidArgument("order must be odd".into()));
    }
    let mut acc = Rational::zero();
    for (j, e) in lower.iter().enumerate() {
        let c = Rational::from_integer(BigInt::from(binomial(m as u64, j as u64)));
        if j % 2 == 0 {
            acc += c * e;
        } else {
            acc -= c * e;
        }
    }
    Ok(acc / Rational::from_integer(BigInt::from(2)))
}
