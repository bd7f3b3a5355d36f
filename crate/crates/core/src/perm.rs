//! Permutations in one-line notation, patterns and occurrence densities.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use rand::Rng;

use crate::error::{Error, Result};
use crate::rational::{binomial, rational_from_uints, Rational};

/// A permutation of `{1, ..., n}` with `n >= 1`, stored in one-line notation.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    values: Vec<u32>,
}

impl Permutation {
    pub fn new(values: Vec<u32>) -> Result<Self> {
        let n = values.len();
        if n == 0 {
            return Err(Error::InvalidPermutation("empty".into()));
        }
        if n > u32::MAX as usize {
            return Err(Error::InvalidPermutation(format!("size {n} too large")));
        }
        let mut seen = vec![false; n];
        for &v in &values {
            let v = v as usize;
            if v == 0 || v > n {
                return Err(Error::InvalidPermutation(format!(
                    "value {v} outside 1..={n}"
                )));
            }
            if std::mem::replace(&mut seen[v - 1], true) {
                return Err(Error::InvalidPermutation(format!("value {v} repeated")));
            }
        }
        Ok(Self { values })
    }

    pub(crate) fn from_vec_unchecked(values: Vec<u32>) -> Self {
        debug_assert!(Self::new(values.clone()).is_ok());
        Self { values }
    }

    pub fn identity(n: usize) -> Self {
        assert!(n >= 1, "permutations have size at least 1");
        Self::from_vec_unchecked((1..=n as u32).collect())
    }

    /// The permutation order-isomorphic to `values`, which must be distinct.
    pub fn standardize(values: &[u32]) -> Self {
        let mut order: Vec<usize> = (0..values.len()).collect();
        order.sort_unstable_by_key(|&i| values[i]);
        let mut out = vec![0u32; values.len()];
        for (rank, &i) in order.iter().enumerate() {
            out[i] = rank as u32 + 1;
        }
        Self::from_vec_unchecked(out)
    }

    /// Parses a pattern given either as whitespace-separated values or, when it
    /// contains no whitespace, as one digit per value (`132`).
    pub fn parse_pattern(s: &str) -> Result<Self> {
        let s = s.trim();
        if !s.is_empty() && !s.contains(char::is_whitespace) && s.chars().all(|c| c.is_ascii_digit())
        {
            let values = s.bytes().map(|b| (b - b'0') as u32).collect();
            return Self::new(values);
        }
        s.parse()
    }

    pub fn size(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[u32] {
        &self.values
    }

    pub fn into_values(self) -> Vec<u32> {
        self.values
    }

    /// `σ_i` for a 1-based position `i`.
    pub fn at(&self, i: usize) -> u32 {
        self.values[i - 1]
    }

    /// `pat_I(σ)` for a set `I` of 1-based positions, given in any order.
    pub fn pattern_at(&self, indices: &[usize]) -> Result<Self> {
        let idx = normalize_index_set(indices, self.size())?;
        let vals: Vec<u32> = idx.iter().map(|&i| self.values[i - 1]).collect();
        Ok(Self::standardize(&vals))
    }

    pub fn inverse(&self) -> Self {
        let mut out = vec![0u32; self.size()];
        for (i, &v) in self.values.iter().enumerate() {
            out[v as usize - 1] = i as u32 + 1;
        }
        Self::from_vec_unchecked(out)
    }

    pub fn reverse(&self) -> Self {
        Self::from_vec_unchecked(self.values.iter().rev().copied().collect())
    }

    pub fn complement(&self) -> Self {
        let n = self.size() as u32 + 1;
        Self::from_vec_unchecked(self.values.iter().map(|&v| n - v).collect())
    }

    /// `π ⊕ σ`.
    pub fn direct_sum(&self, other: &Self) -> Self {
        let k = self.size() as u32;
        let mut v = self.values.clone();
        v.extend(other.values.iter().map(|&x| x + k));
        Self::from_vec_unchecked(v)
    }

    /// `π ⊖ σ`.
    pub fn skew_sum(&self, other: &Self) -> Self {
        let l = other.size() as u32;
        let mut v: Vec<u32> = self.values.iter().map(|&x| x + l).collect();
        v.extend_from_slice(&other.values);
        Self::from_vec_unchecked(v)
    }

    /// `⊕[π¹, ..., π^r]`.
    pub fn direct_sum_all(parts: &[Self]) -> Result<Self> {
        let (first, rest) = parts
            .split_first()
            .ok_or_else(|| Error::InvalidArgument("empty sum".into()))?;
        Ok(rest.iter().fold(first.clone(), |acc, p| acc.direct_sum(p)))
    }

    /// `⊖[π¹, ..., π^r]`.
    pub fn skew_sum_all(parts: &[Self]) -> Result<Self> {
        let (first, rest) = parts
            .split_first()
            .ok_or_else(|| Error::InvalidArgument("empty sum".into()))?;
        Ok(rest.iter().fold(first.clone(), |acc, p| acc.skew_sum(p)))
    }

    /// Rank of the permutation in lexicographic order among permutations of
    /// the same size. Sizes up to 20 fit in a `u64`.
    pub fn lex_rank(&self) -> u64 {
        lex_rank_of(&self.values)
    }

    pub fn from_lex_rank(n: usize, mut rank: u64) -> Result<Self> {
        if n == 0 || n > 20 {
            return Err(Error::InvalidArgument(format!("size {n} outside 1..=20")));
        }
        let fact = factorials(n);
        if rank >= fact[n] {
            return Err(Error::InvalidArgument(format!("rank {rank} >= {n}!")));
        }
        let mut pool: Vec<u32> = (1..=n as u32).collect();
        let mut out = Vec::with_capacity(n);
        for i in (0..n).rev() {
            let d = (rank / fact[i]) as usize;
            rank %= fact[i];
            out.push(pool.remove(d));
        }
        Ok(Self::from_vec_unchecked(out))
    }

    /// Lexicographic successor, or `None` for the decreasing permutation.
    pub fn next_lex(&self) -> Option<Self> {
        let mut v = self.values.clone();
        let i = v.windows(2).rposition(|w| w[0] < w[1])?;
        let j = v.iter().rposition(|&x| x > v[i]).expect("pivot has a successor");
        v.swap(i, j);
        v[i + 1..].reverse();
        Some(Self::from_vec_unchecked(v))
    }

    /// True when `self` contains no occurrence of `pattern`.
    pub fn avoids(&self, pattern: &Self) -> bool {
        let k = pattern.size();
        if k > self.size() {
            return true;
        }
        let mut found = false;
        for_each_combination(self.size(), k, |c| {
            if matches_at(self, pattern, c) {
                found = true;
                return false;
            }
            true
        });
        !found
    }

    /// True when the permutation avoids 2413 and 3142, computed through the
    /// decomposition tree.
    pub fn is_separable(&self) -> bool {
        crate::tree::decomposition_tree(self).is_ok()
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.values.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

impl FromStr for Permutation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let values = s
            .split_whitespace()
            .map(|t| {
                t.parse::<u32>()
                    .map_err(|e| Error::Parse(format!("bad value {t:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(values)
    }
}

/// Sorts a set of 1-based indices, rejecting duplicates and out-of-range
/// entries.
pub(crate) fn normalize_index_set(indices: &[usize], len: usize) -> Result<Vec<usize>> {
    if indices.is_empty() {
        return Err(Error::EmptyIndexSet);
    }
    let mut idx = indices.to_vec();
    idx.sort_unstable();
    for w in idx.windows(2) {
        if w[0] == w[1] {
            return Err(Error::DuplicateIndex(w[0]));
        }
    }
    if let Some(&bad) = idx.iter().find(|&&i| i == 0 || i > len) {
        return Err(Error::IndexOutOfRange { index: bad, len });
    }
    Ok(idx)
}

/// Whether `pat_c(sigma) = pattern`, with `c` a sorted 0-based position tuple.
#[inline]
fn matches_at(sigma: &Permutation, pattern: &Permutation, c: &[usize]) -> bool {
    let p = pattern.values();
    let s = sigma.values();
    for a in 0..c.len() {
        for b in a + 1..c.len() {
            if (s[c[a]] < s[c[b]]) != (p[a] < p[b]) {
                return false;
            }
        }
    }
    true
}

fn factorials(n: usize) -> Vec<u64> {
    let mut f = vec![1u64; n + 1];
    for i in 1..=n {
        f[i] = f[i - 1] * i as u64;
    }
    f
}

/// Lexicographic rank of the pattern order-isomorphic to `vals`.
pub(crate) fn lex_rank_of(vals: &[u32]) -> u64 {
    let k = vals.len();
    let mut rank = 0u64;
    for i in 0..k {
        let smaller = vals[i + 1..].iter().filter(|&&x| x < vals[i]).count() as u64;
        rank = rank * (k - i) as u64 + smaller;
    }
    rank
}

/// Calls `f` on every increasing `k`-tuple of `0..n` in lexicographic order
/// until it returns `false`.
pub fn for_each_combination(n: usize, k: usize, mut f: impl FnMut(&[usize]) -> bool) {
    if k > n {
        return;
    }
    let mut c: Vec<usize> = (0..k).collect();
    loop {
        if !f(&c) {
            return;
        }
        let mut i = k;
        while i > 0 && c[i - 1] == n - k + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return;
        }
        c[i - 1] += 1;
        for j in i..k {
            c[j] = c[j - 1] + 1;
        }
    }
}

/// Number of `k`-subsets `I` with `pat_I(sigma) = pattern`.
pub fn occurrence_count(pattern: &Permutation, sigma: &Permutation) -> u64 {
    let k = pattern.size();
    let mut count = 0u64;
    for_each_combination(sigma.size(), k, |c| {
        if matches_at(sigma, pattern, c) {
            count += 1;
        }
        true
    });
    count
}

/// `occ(π, σ)`: the proportion of `|π|`-subsets of positions inducing `π`,
/// and 0 when `|π| > |σ|`.
pub fn occ_exact(pattern: &Permutation, sigma: &Permutation) -> Rational {
    let (k, n) = (pattern.size(), sigma.size());
    if k > n {
        return Rational::from_integer(0.into());
    }
    let count = BigUint::from(occurrence_count(pattern, sigma));
    rational_from_uints(&count, &binomial(n as u64, k as u64))
}

/// Occurrence counts of every pattern of size `k` in `sigma`, indexed by the
/// pattern's lexicographic rank. Requires `k <= 10`.
pub fn pattern_counts(sigma: &Permutation, k: usize) -> Vec<u64> {
    assert!((1..=10).contains(&k), "pattern size must be in 1..=10");
    let total = factorials(k)[k] as usize;
    let mut counts = vec![0u64; total];
    let s = sigma.values();
    let mut buf = vec![0u32; k];
    for_each_combination(sigma.size(), k, |c| {
        for (b, &i) in buf.iter_mut().zip(c) {
            *b = s[i];
        }
        counts[lex_rank_of(&buf) as usize] += 1;
        true
    });
    counts
}

/// Monte Carlo estimate of `occ(π, σ)` from `trials` uniform `|π|`-subsets.
pub fn occ_sample<R: Rng + ?Sized>(
    pattern: &Permutation,
    sigma: &Permutation,
    trials: u64,
    rng: &mut R,
) -> Result<f64> {
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be at least 1".into()));
    }
    let (k, n) = (pattern.size(), sigma.size());
    if k > n {
        return Err(Error::SizeMismatch {
            patterns: k,
            target: n,
        });
    }
    let mut hits = 0u64;
    let mut c = vec![0usize; k];
    for _ in 0..trials {
        sample_sorted_subset(rng, n, &mut c);
        if matches_at(sigma, pattern, &c) {
            hits += 1;
        }
    }
    Ok(hits as f64 / trials as f64)
}

/// Fills `out` with a uniform sorted `out.len()`-subset of `0..n`.
pub(crate) fn sample_sorted_subset<R: Rng + ?Sized>(rng: &mut R, n: usize, out: &mut [usize]) {
    let k = out.len();
    // Floyd's algorithm; k is small so a linear membership scan is cheapest.
    let mut len = 0;
    for j in n - k..n {
        let t = rng.random_range(0..=j);
        let pick = if out[..len].contains(&t) { j } else { t };
        out[len] = pick;
        len += 1;
    }
    out.sort_unstable();
}

/// Every permutation of size `n` in lexicographic order.
pub fn all_permutations(n: usize) -> impl Iterator<Item = Permutation> {
    std::iter::successors(Some(Permutation::identity(n)), |p| p.next_lex())
}

/// Every separable permutation of size `n` in lexicographic order.
pub fn separable_permutations(n: usize) -> Vec<Permutation> {
    all_permutations(n).filter(|p| p.is_separable()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn p(s: &str) -> Permutation {
        Permutation::parse_pattern(s).unwrap()
    }

    #[test]
    fn validation() {
        assert!(Permutation::new(vec![]).is_err());
        assert!(Permutation::new(vec![1, 1]).is_err());
        assert!(Permutation::new(vec![0, 1]).is_err());
        assert!(Permutation::new(vec![2, 3]).is_err());
        assert!(Permutation::new(vec![2, 1, 3]).is_ok());
    }

    #[test]
    fn text_round_trip() {
        let s = p("65831247");
        assert_eq!(s.to_string(), "6 5 8 3 1 2 4 7");
        assert_eq!(s.to_string().parse::<Permutation>().unwrap(), s);
        assert_eq!(p("10 1 2 3 4 5 6 7 8 9").at(1), 10);
        assert!("1 x".parse::<Permutation>().is_err());
    }

    #[test]
    fn worked_patterns() {
        assert_eq!(p("65831247").pattern_at(&[2, 5, 7]).unwrap(), p("312"));
        assert_eq!(p("3214576").pattern_at(&[2, 4, 7]).unwrap(), p("123"));
        let s = p("3214576");
        assert_eq!(s.pattern_at(&[1, 2, 3, 4, 5, 6, 7]).unwrap(), s);
        assert_eq!(
            s.pattern_at(&[1, 8]),
            Err(Error::IndexOutOfRange { index: 8, len: 7 })
        );
        assert_eq!(s.pattern_at(&[2, 2]), Err(Error::DuplicateIndex(2)));
        assert_eq!(s.pattern_at(&[]), Err(Error::EmptyIndexSet));
    }

    #[test]
    fn sums() {
        assert_eq!(p("12").direct_sum(&p("21")), p("1243"));
        assert_eq!(p("1").skew_sum(&p("1")), p("21"));
        let a = Permutation::direct_sum_all(&[p("321"), p("1")]).unwrap();
        assert_eq!(a, p("3214"));
        let b = Permutation::direct_sum_all(&[a, p("1"), p("21")]).unwrap();
        assert_eq!(b, p("3214576"));
        assert!(Permutation::skew_sum_all(&[]).is_err());
    }

    #[test]
    fn occurrence_densities() {
        assert_eq!(occ_exact(&p("12"), &p("12")), ratio(1, 1));
        assert_eq!(occ_exact(&p("21"), &p("231")), ratio(2, 3));
        assert_eq!(occ_exact(&p("123"), &p("12")), ratio(0, 1));
        assert_eq!(occ_exact(&p("2413"), &p("3214576")), ratio(0, 1));
    }

    #[test]
    fn sampled_density() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        assert_eq!(occ_sample(&p("12"), &p("12"), 10, &mut rng).unwrap(), 1.0);
        assert_eq!(occ_sample(&p("21"), &p("21"), 10, &mut rng).unwrap(), 1.0);
        let trials = 100_000;
        let est = occ_sample(&p("12"), &p("2413"), trials, &mut rng).unwrap();
        let oracle = {
            let s = [2, 4, 1, 3];
            let mut asc = 0;
            for i in 0..4 {
                for j in i + 1..4 {
                    if s[i] < s[j] {
                        asc += 1;
                    }
                }
            }
            asc as f64 / 6.0
        };
        assert_eq!(occ_exact(&p("12"), &p("2413")), ratio(1, 2));
        assert!((est - oracle).abs() < 3.0 / (trials as f64).sqrt());
        assert!(occ_sample(&p("12"), &p("12"), 0, &mut rng).is_err());
        assert!(occ_sample(&p("123"), &p("12"), 1, &mut rng).is_err());
    }

    #[test]
    fn separable_counts_by_brute_force() {
        let (a, b) = (p("2413"), p("3142"));
        for (n, want) in [(1, 1), (2, 2), (3, 6), (4, 22), (5, 90), (6, 394)] {
            let brute = all_permutations(n)
                .filter(|s| s.avoids(&a) && s.avoids(&b))
                .count();
            assert_eq!(brute, want);
            for s in all_permutations(n) {
                assert_eq!(s.is_separable(), s.avoids(&a) && s.avoids(&b), "{s}");
            }
        }
        assert!(!p("2413").is_separable());
        assert!(p("3214576").is_separable());
    }

    #[test]
    fn separability_closed_under_patterns() {
        for n in 1..=6 {
            for s in separable_permutations(n) {
                for k in 1..=n {
                    for_each_combination(n, k, |c| {
                        let idx: Vec<usize> = c.iter().map(|i| i + 1).collect();
                        assert!(s.pattern_at(&idx).unwrap().is_separable());
                        true
                    });
                }
            }
        }
    }

    #[test]
    fn lex_ranks() {
        let perms: Vec<_> = all_permutations(4).collect();
        assert_eq!(perms.len(), 24);
        for (r, q) in perms.iter().enumerate() {
            assert_eq!(q.lex_rank(), r as u64);
            assert_eq!(&Permutation::from_lex_rank(4, r as u64).unwrap(), q);
        }
        assert!(Permutation::from_lex_rank(3, 6).is_err());
    }

    #[test]
    fn combination_count() {
        let mut n = 0;
        for_each_combination(7, 3, |_| {
            n += 1;
            true
        });
        assert_eq!(n, 35);
        let mut empty = 0;
        for_each_combination(2, 3, |_| {
            empty += 1;
            true
        });
        assert_eq!(empty, 0);
        let mut zero = 0;
        for_each_combination(3, 0, |c| {
            assert!(c.is_empty());
            zero += 1;
            true
        });
        assert_eq!(zero, 1);
    }

    fn arb_perm(max: usize) -> impl Strategy<Value = Permutation> {
        (1..=max)
            .prop_flat_map(|n| Just((1..=n as u32).collect::<Vec<_>>()).prop_shuffle())
            .prop_map(|v| Permutation::new(v).unwrap())
    }

    proptest! {
        #[test]
        fn densities_sum_to_one(s in arb_perm(9), k in 1usize..=4) {
            prop_assume!(k <= s.size());
            let counts = pattern_counts(&s, k);
            let total: u64 = counts.iter().sum();
            prop_assert_eq!(BigUint::from(total), binomial(s.size() as u64, k as u64));
            for (r, &c) in counts.iter().enumerate() {
                let pi = Permutation::from_lex_rank(k, r as u64).unwrap();
                prop_assert_eq!(c, occurrence_count(&pi, &s));
            }
        }

        #[test]
        fn ascents_and_descents(s in arb_perm(12)) {
            prop_assume!(s.size() >= 2);
            let sum = occ_exact(&p("12"), &s) + occ_exact(&p("21"), &s);
            prop_assert_eq!(sum, ratio(1, 1));
        }

        #[test]
        fn nested_patterns(s in arb_perm(12), seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let n = s.size();
            let k = rng.random_range(1..=n);
            let mut i = vec![0; k];
            sample_sorted_subset(&mut rng, n, &mut i);
            let j_len = rng.random_range(1..=k);
            let mut j = vec![0; j_len];
            sample_sorted_subset(&mut rng, k, &mut j);
            let i1: Vec<usize> = i.iter().map(|x| x + 1).collect();
            let j1: Vec<usize> = j.iter().map(|x| x + 1).collect();
            let composed: Vec<usize> = j.iter().map(|&x| i1[x]).collect();
            let lhs = s.pattern_at(&i1).unwrap().pattern_at(&j1).unwrap();
            prop_assert_eq!(lhs, s.pattern_at(&composed).unwrap());
        }

        #[test]
        fn involutions(s in arb_perm(10)) {
            prop_assert_eq!(s.inverse().inverse(), s.clone());
            prop_assert_eq!(s.reverse().reverse(), s.clone());
            prop_assert_eq!(s.complement().complement(), s.clone());
        }
    }
}
