//! Exact uniform samplers for Schröder trees and separable permutations, and
//! the conditioned Galton-Watson sampler used to cross-check them.

use std::sync::OnceLock;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rand::seq::index;
use rand::{Rng, RngCore};

use crate::error::{Error, Result};
use crate::perm::Permutation;
use crate::tree::{SchroderTree, Sign, SignedTree};

/// Sizes up to this use the counting sampler; larger ones the cycle-lemma
/// sampler. Both are exactly uniform.
pub const COUNTING_THRESHOLD: usize = 128;

/// `s(n)`, the number of Schröder trees with `n` leaves, and `g(n)`, the
/// number of nonempty sequences of Schröder trees with `n` leaves in total.
#[derive(Clone, Debug)]
pub struct CountTable {
    s: Vec<BigUint>,
    g: Vec<BigUint>,
}

impl CountTable {
    pub fn new(max_n: usize) -> Self {
        let mut s = vec![BigUint::zero(), BigUint::one()];
        let mut g = vec![BigUint::zero(), BigUint::one()];
        for n in 2..=max_n.max(1) {
            let mut total = BigUint::zero();
            for j in 1..n {
                total += &s[j] * &g[n - j];
            }
            g.push(&total << 1);
            s.push(total);
        }
        Self { s, g }
    }

    pub fn max_n(&self) -> usize {
        self.s.len() - 1
    }

    pub fn trees(&self, n: usize) -> &BigUint {
        &self.s[n]
    }

    pub fn sequences(&self, n: usize) -> &BigUint {
        &self.g[n]
    }

    /// Uniform tree with `n` leaves: each child-size composition is drawn with
    /// probability proportional to the product of the subtree counts.
    pub fn sample<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Result<SchroderTree> {
        if n == 0 {
            return Err(Error::InvalidArgument("size must be at least 1".into()));
        }
        if n > self.max_n() {
            return Err(Error::InvalidArgument(format!(
                "table covers sizes up to {}",
                self.max_n()
            )));
        }
        let mut arity = Vec::with_capacity(2 * n);
        let mut stack = vec![n];
        let mut sizes = Vec::new();
        while let Some(m) = stack.pop() {
            if m == 1 {
                arity.push(0);
                continue;
            }
            sizes.clear();
            // First child, then the remaining nonempty sequence, which is either
            // a single tree or splits off its own first tree.
            let first = self.pick(m, &self.s[m], rng);
            sizes.push(first);
            let mut rest = m - first;
            loop {
                let r = random_below(rng, &self.g[rest]);
                if r < self.s[rest] {
                    sizes.push(rest);
                    break;
                }
                let j = self.pick_with(rest, r - &self.s[rest]);
                sizes.push(j);
                rest -= j;
            }
            arity.push(sizes.len() as u32);
            stack.extend(sizes.iter().rev());
        }
        SchroderTree::from_arities(arity)
    }

    /// Draws `j` in `1..m` with weight `s(j) g(m-j)`, the weights summing to `total`.
    fn pick<R: Rng + ?Sized>(&self, m: usize, total: &BigUint, rng: &mut R) -> usize {
        let r = random_below(rng, total);
        self.pick_with(m, r)
    }

    fn pick_with(&self, m: usize, mut r: BigUint) -> usize {
        for j in 1..m {
            let w = &self.s[j] * &self.g[m - j];
            if r < w {
                return j;
            }
            r -= w;
        }
        unreachable!("weights sum to the total")
    }
}

/// Uniform integer in `0..bound` by rejection on random bits.
fn random_below<R: Rng + ?Sized>(rng: &mut R, bound: &BigUint) -> BigUint {
    assert!(!bound.is_zero());
    let bits = bound.bits();
    let words = bits.div_ceil(32) as usize;
    let top = bits - 32 * (words as u64 - 1);
    let mask = if top == 32 { u32::MAX } else { (1u32 << top) - 1 };
    let mut digits = vec![0u32; words];
    loop {
        for d in digits.iter_mut() {
            *d = rng.next_u32();
        }
        digits[words - 1] &= mask;
        let x = BigUint::new(digits.clone());
        if &x < bound {
            return x;
        }
    }
}

pub(crate) fn shared_table() -> &'static CountTable {
    static TABLE: OnceLock<CountTable> = OnceLock::new();
    TABLE.get_or_init(|| CountTable::new(COUNTING_THRESHOLD))
}

/// Uniform Schröder tree with `n` leaves.
pub fn sample_schroder_tree<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<SchroderTree> {
    if n <= COUNTING_THRESHOLD {
        shared_table().sample(n, rng)
    } else {
        sample_schroder_tree_cycle(n, rng)
    }
}

/// Uniform separable permutation of size `n`: a uniform tree with alternating
/// signs from a fair root sign.
pub fn sample_separable<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Permutation> {
    let tree = sample_schroder_tree(n, rng)?;
    let root = if rng.random::<bool>() {
        Sign::Plus
    } else {
        Sign::Minus
    };
    Ok(SignedTree::alternating(tree, root).perm())
}

/// Bernoulli trials of probability `threshold / 2^32`, 64 at a time.
#[derive(Clone, Copy)]
struct DyadicBernoulli {
    threshold: u32,
}

impl DyadicBernoulli {
    /// Success mask for 64 independent trials: lane `i` compares its own
    /// uniform 32-bit number with the threshold, most significant bit first.
    #[inline]
    fn block<R: RngCore + ?Sized>(self, rng: &mut R) -> u64 {
        let mut less = 0u64;
        let mut equal = u64::MAX;
        for b in (0..32).rev() {
            let w = rng.next_u64();
            if (self.threshold >> b) & 1 == 1 {
                less |= equal & !w;
                equal &= w;
            } else {
                equal &= !w;
            }
            if equal == 0 {
                break;
            }
        }
        less
    }

    fn binomial<R: RngCore + ?Sized>(self, trials: usize, rng: &mut R) -> usize {
        let mut count = 0;
        for _ in 0..trials / 64 {
            count += self.block(rng).count_ones() as usize;
        }
        let rem = trials % 64;
        if rem > 0 {
            count += (self.block(rng) & ((1u64 << rem) - 1)).count_ones() as usize;
        }
        count
    }

    /// Successes before the `failures`-th failure.
    fn negative_binomial<R: RngCore + ?Sized>(self, failures: usize, rng: &mut R) -> usize {
        let mut successes = 0;
        let mut failed = 0;
        loop {
            let hit = self.block(rng);
            let miss = !hit;
            let f = miss.count_ones() as usize;
            if failed + f < failures {
                failed += f;
                successes += 64 - f;
                continue;
            }
            let mut m = miss;
            for _ in 0..failures - failed - 1 {
                m &= m - 1;
            }
            let pos = m.trailing_zeros();
            successes += (hit & ((1u64 << pos) - 1)).count_ones() as usize;
            return successes;
        }
    }
}

// Dyadic parameters for the law of the number of internal vertices. With
// p = P / 2^32 and r = R / 2^32, the ratio c = p r / (1 - r) is just above 1
// and is corrected exactly by CORR_NUM / CORR_DEN = 1 / c per internal vertex.
const R_THRESHOLD: u32 = 3_037_000_500;
const P_THRESHOLD: u32 = 1_779_033_704;
const CORR_NUM: u64 = (1u64 << 32) * ((1u64 << 32) - R_THRESHOLD as u64);
const CORR_DEN: u64 = P_THRESHOLD as u64 * R_THRESHOLD as u64;

/// Uniform Schröder tree with `n` leaves through the cycle lemma.
///
/// A tree with `n` leaves and `k` internal vertices has `n` rotations of its
/// Lukasiewicz word ending with a leaf, and those words are counted by
/// `C(n-1+k, k) C(n-2, k-1)`. The number `k` is drawn from that law by
/// rejection (negative binomial times binomial), then a uniform word is
/// rotated into a tree.
pub fn sample_schroder_tree_cycle<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<SchroderTree> {
    if n == 0 {
        return Err(Error::InvalidArgument("size must be at least 1".into()));
    }
    if n == 1 {
        return Ok(SchroderTree::leaf());
    }
    let k = internal_vertex_count(n, rng);
    let len = n + k;
    // Internal letters at uniform positions among the first len-1; their
    // arities minus one form a uniform composition of n-1 into k parts.
    let mut internal = vec![false; len];
    for i in index::sample(rng, len - 1, k).iter() {
        internal[i] = true;
    }
    let mut cut = vec![false; n - 1];
    for i in index::sample(rng, n - 2, k - 1).iter() {
        cut[i + 1] = true;
    }
    let mut parts = Vec::with_capacity(k);
    let mut last = 0;
    for i in 1..n - 1 {
        if cut[i] {
            parts.push(i - last);
            last = i;
        }
    }
    parts.push(n - 1 - last);
    let mut word = Vec::with_capacity(len);
    let mut next = parts.iter();
    for &is_internal in &internal {
        word.push(if is_internal {
            *next.next().expect("one part per internal letter") as u32 + 1
        } else {
            0
        });
    }
    SchroderTree::from_arities(rotate_to_tree(&word))
}

/// The rotation of a word with step sum `-1` whose partial sums stay
/// nonnegative until the last letter.
fn rotate_to_tree(word: &[u32]) -> Vec<u32> {
    let mut sum = 0i64;
    let mut best = i64::MAX;
    let mut at = 0;
    for (i, &a) in word.iter().enumerate() {
        sum += a as i64 - 1;
        if sum < best {
            best = sum;
            at = i;
        }
    }
    let start = (at + 1) % word.len();
    word[start..].iter().chain(&word[..start]).copied().collect()
}

/// Draws `k` with probability proportional to `C(n-1+k, k) C(n-2, k-1)`.
fn internal_vertex_count<R: Rng + ?Sized>(n: usize, rng: &mut R) -> usize {
    let p = DyadicBernoulli {
        threshold: P_THRESHOLD,
    };
    let r = DyadicBernoulli {
        threshold: R_THRESHOLD,
    };
    'attempt: loop {
        let k = p.negative_binomial(n, rng);
        if k == 0 || r.binomial(n - 2, rng) != k - 1 {
            continue;
        }
        for _ in 0..k {
            if rng.random_range(0..CORR_DEN) >= CORR_NUM {
                continue 'attempt;
            }
        }
        return k;
    }
}

/// The critical offspring law `ν` with `ν(0) = 2 - √2`, `ν(1) = 0` and
/// `ν(i) = (1 - √2/2)^(i-1)` for `i >= 2`.
#[derive(Clone, Copy, Debug, Default)]
pub struct OffspringLaw;

impl OffspringLaw {
    pub const LEAF: f64 = 2.0 - std::f64::consts::SQRT_2;
    pub const RATIO: f64 = 1.0 - std::f64::consts::FRAC_1_SQRT_2;

    pub fn pmf(&self, i: u32) -> f64 {
        match i {
            0 => Self::LEAF,
            1 => 0.0,
            _ => Self::RATIO.powi(i as i32 - 1),
        }
    }

    /// Numerical mean and variance from the series, truncated once the
    /// geometric tail is negligible.
    pub fn mean_variance(&self) -> (f64, f64) {
        let (mut m1, mut m2) = (0.0, 0.0);
        for i in 2..400u32 {
            let w = self.pmf(i);
            m1 += i as f64 * w;
            m2 += (i as f64).powi(2) * w;
        }
        (m1, m2 - m1 * m1)
    }

    /// Given at least two children, the excess is geometric and is drawn by
    /// inversion.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u32 {
        let u: f64 = rng.random();
        if u < Self::LEAF {
            return 0;
        }
        let v: f64 = 1.0 - rng.random::<f64>();
        2 + (v.ln() / Self::RATIO.ln()).floor() as u32
    }
}

/// A tree from the Galton-Watson sampler and the number of trees drawn.
#[derive(Clone, Debug)]
pub struct GwSample {
    pub tree: SchroderTree,
    pub attempts: u64,
}

/// Galton-Watson trees with offspring law `ν`, redrawn until one has exactly
/// `n` leaves. Trees are abandoned as soon as they exceed `n` leaves.
pub fn sample_gw_conditioned<R: Rng + ?Sized>(
    n: usize,
    rng: &mut R,
    max_attempts: u64,
) -> Result<GwSample> {
    if n == 0 {
        return Err(Error::InvalidArgument("size must be at least 1".into()));
    }
    let law = OffspringLaw;
    let mut arity = Vec::with_capacity(2 * n);
    for attempt in 1..=max_attempts {
        arity.clear();
        let mut open = 1i64;
        let mut leaves = 0;
        while open > 0 && leaves <= n {
            let a = law.sample(rng);
            if a == 0 {
                leaves += 1;
            }
            open += a as i64 - 1;
            arity.push(a);
        }
        if open == 0 && leaves == n {
            return Ok(GwSample {
                tree: SchroderTree::from_arities(arity)?,
                attempts: attempt,
            });
        }
    }
    Err(Error::AttemptsExhausted {
        leaves: n,
        attempts: max_attempts,
    })
}
