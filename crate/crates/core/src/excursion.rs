//! Discretized excursions, random signs on their minima, and extraction of
//! trees and permutations from points of `[0,1]`.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::distribution::DistributionFunction;
use crate::error::{ConditionCFailure, Error, Result};
use crate::perm::Permutation;
use crate::tree::{SchroderTree, Sign, SignedTree};

/// Points closer than this to a grid abscissa (in grid units) are snapped to it.
const SNAP: f64 = 1e-9;

/// `λ = sqrt(2 + 3/√2)`, the scaling of the contour of large uniform trees.
pub fn contour_scaling_constant() -> f64 {
    (2.0 + 3.0 / std::f64::consts::SQRT_2).sqrt()
}

/// A nonnegative path sampled on the grid `{0, 1/m, ..., 1}`, read
/// piecewise-linearly, vanishing at both ends.
#[derive(Clone, Debug, PartialEq)]
pub struct Excursion {
    values: Vec<f64>,
}

impl Excursion {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::InvalidExcursion("at least two grid values needed".into()));
        }
        if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::InvalidExcursion("values must be finite and nonnegative".into()));
        }
        if values[0] != 0.0 || *values.last().unwrap() != 0.0 {
            return Err(Error::InvalidExcursion("endpoints must be zero".into()));
        }
        Ok(Self { values })
    }

    /// Number of grid steps `m`.
    pub fn grid(&self) -> usize {
        self.values.len() - 1
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    /// `f(x)` by linear interpolation.
    pub fn value_at(&self, x: f64) -> f64 {
        let (_, v) = self.locate(x);
        v
    }

    /// Grid coordinate of `x` (snapped when within tolerance) and `f(x)`.
    fn locate(&self, x: f64) -> (f64, f64) {
        let m = self.grid();
        let u = (x * m as f64).clamp(0.0, m as f64);
        let r = u.round();
        if (u - r).abs() <= SNAP {
            return (r, self.values[r as usize]);
        }
        let i = u.floor() as usize;
        let frac = u - i as f64;
        (u, self.values[i] + (self.values[i + 1] - self.values[i]) * frac)
    }

    /// Interior grid indices `i` with `f_{i-1} > f_i < f_{i+1}`.
    pub fn strict_minima(&self) -> Vec<usize> {
        let f = &self.values;
        (1..f.len() - 1)
            .filter(|&i| f[i - 1] > f[i] && f[i] < f[i + 1])
            .collect()
    }
}

/// An excursion with a sign on each strict local minimum.
#[derive(Clone, Debug, PartialEq)]
pub struct SignedExcursion {
    excursion: Excursion,
    signs: Vec<Option<Sign>>,
}

impl SignedExcursion {
    /// `signs[i]` must be set exactly at the strict local minima.
    pub fn new(excursion: Excursion, signs: Vec<Option<Sign>>) -> Result<Self> {
        if signs.len() != excursion.values.len() {
            return Err(Error::InvalidExcursion("one sign slot per grid point expected".into()));
        }
        let mut is_min = vec![false; signs.len()];
        for i in excursion.strict_minima() {
            is_min[i] = true;
        }
        if let Some(i) = (0..signs.len()).find(|&i| signs[i].is_some() != is_min[i]) {
            return Err(Error::InvalidExcursion(format!(
                "grid point {i}: signs belong exactly to strict local minima"
            )));
        }
        Ok(Self { excursion, signs })
    }

    /// Attaches `signs`, in left-to-right order, to the strict local minima.
    pub fn with_minima_signs(excursion: Excursion, signs: &[Sign]) -> Result<Self> {
        let minima = excursion.strict_minima();
        if minima.len() != signs.len() {
            return Err(Error::InvalidExcursion(format!(
                "{} strict minima but {} signs",
                minima.len(),
                signs.len()
            )));
        }
        let mut dense = vec![None; excursion.values.len()];
        for (&i, &s) in minima.iter().zip(signs) {
            dense[i] = Some(s);
        }
        Ok(Self {
            excursion,
            signs: dense,
        })
    }

    /// The normalized contour of `t` with each valley signed like the
    /// internal vertex it visits.
    pub fn signed_contour(st: &SignedTree) -> Result<Self> {
        let excursion = st.tree().contour()?;
        let tour = st.tree().euler_tour();
        let mut signs = vec![None; tour.len()];
        for i in excursion.strict_minima() {
            signs[i] = st.sign(tour[i]);
        }
        Self::new(excursion, signs)
    }

    pub fn excursion(&self) -> &Excursion {
        &self.excursion
    }

    pub fn signs(&self) -> &[Option<Sign>] {
        &self.signs
    }

    pub fn sign_at(&self, i: usize) -> Option<Sign> {
        self.signs[i]
    }
}

/// A discretized standard Brownian excursion on `m` grid steps: a Gaussian
/// random-walk bridge cyclically shifted to start at its minimum.
pub fn sample_brownian_excursion<R: Rng + ?Sized>(m: usize, rng: &mut R) -> Result<Excursion> {
    if m < 2 {
        return Err(Error::InvalidArgument("grid size must be at least 2".into()));
    }
    let step = (m as f64).recip().sqrt();
    let mut walk = Vec::with_capacity(m + 1);
    let mut s = 0.0f64;
    walk.push(0.0);
    for _ in 0..m {
        let z: f64 = rng.sample(StandardNormal);
        s += z * step;
        walk.push(s);
    }
    let end = walk[m];
    let bridge: Vec<f64> = walk
        .iter()
        .enumerate()
        .map(|(i, &w)| w - end * (i as f64 / m as f64))
        .collect();
    let tau = (0..m)
        .min_by(|&a, &b| bridge[a].total_cmp(&bridge[b]))
        .expect("m >= 2");
    let low = bridge[tau];
    let mut values: Vec<f64> = (0..=m).map(|i| bridge[(tau + i) % m] - low).collect();
    values[0] = 0.0;
    values[m] = 0.0;
    Excursion::new(values)
}

/// Independent fair signs on the strict local minima of `f`.
pub fn assign_signs<R: Rng + ?Sized>(f: Excursion, rng: &mut R) -> SignedExcursion {
    let mut signs = vec![None; f.values.len()];
    for i in f.strict_minima() {
        signs[i] = Some(if rng.random::<bool>() {
            Sign::Plus
        } else {
            Sign::Minus
        });
    }
    SignedExcursion {
        excursion: f,
        signs,
    }
}

/// Range-minimum structure over the grid values of an excursion, with
/// reusable buffers for repeated extractions.
pub struct Extractor<'a> {
    f: &'a Excursion,
    signs: Option<&'a [Option<Sign>]>,
    table: Vec<Vec<u32>>,
    mins: Vec<f64>,
    interval_signs: Vec<Option<Sign>>,
    blocks: Vec<(usize, usize)>,
    ties: Vec<usize>,
    scratch: Vec<(usize, usize)>,
    arity: Vec<u32>,
    tree_signs: Vec<Option<Sign>>,
}

impl<'a> Extractor<'a> {
    pub fn new(f: &'a Excursion) -> Self {
        let vals = &f.values;
        let n = vals.len();
        let mut table = vec![(0..n as u32).collect::<Vec<u32>>()];
        let mut width = 1;
        while 2 * width <= n {
            let prev = table.last().unwrap();
            let level = (0..=n - 2 * width)
                .map(|i| {
                    let (a, b) = (prev[i], prev[i + width]);
                    if vals[b as usize] < vals[a as usize] {
                        b
                    } else {
                        a
                    }
                })
                .collect();
            table.push(level);
            width *= 2;
        }
        Self {
            f,
            signs: None,
            table,
            mins: Vec::new(),
            interval_signs: Vec::new(),
            blocks: Vec::new(),
            ties: Vec::new(),
            scratch: Vec::new(),
            arity: Vec::new(),
            tree_signs: Vec::new(),
        }
    }

    pub fn signed(s: &'a SignedExcursion) -> Self {
        let mut e = Self::new(&s.excursion);
        e.signs = Some(&s.signs);
        e
    }

    /// Leftmost grid index minimizing `f` on `lo..=hi`.
    fn argmin(&self, lo: usize, hi: usize) -> usize {
        let len = hi - lo + 1;
        let k = (usize::BITS - 1 - len.leading_zeros()) as usize;
        let a = self.table[k][lo] as usize;
        let b = self.table[k][hi + 1 - (1 << k)] as usize;
        if self.f.values[b] < self.f.values[a] {
            b
        } else {
            a
        }
    }

    /// Computes the minimum of each gap between consecutive points and, when
    /// signed, checks the interval clauses of the sign condition.
    fn interval_minima(&mut self, x: &[f64], signed: bool) -> Result<()> {
        validate_points(x)?;
        self.mins.clear();
        self.interval_signs.clear();
        let vals = &self.f.values;
        for (gap, w) in x.windows(2).enumerate() {
            let (ua, fa) = self.f.locate(w[0]);
            let (ub, fb) = self.f.locate(w[1]);
            let lo = ua.floor() as i64 + 1;
            let hi = ub.ceil() as i64 - 1;
            let interior = (lo <= hi).then(|| {
                let j = self.argmin(lo as usize, hi as usize);
                (lo as usize, hi as usize, j)
            });
            let end_min = fa.min(fb);
            if !signed {
                let m = match interior {
                    Some((_, _, j)) => vals[j].min(end_min),
                    None => end_min,
                };
                self.mins.push(m);
                continue;
            }
            let Some((lo, hi, j)) = interior.filter(|&(_, _, j)| vals[j] < end_min) else {
                return Err(ConditionCFailure::BoundaryMinimum(gap + 1).into());
            };
            let level = vals[j];
            let signs = self.signs.expect("signed extractor");
            let sign = signs[j].ok_or(ConditionCFailure::UnsignedMinimum(gap + 1))?;
            // Every other grid point of the interval at the same level must be a
            // minimum with the same sign.
            self.scratch.clear();
            if j > lo {
                self.scratch.push((lo, j - 1));
            }
            if j < hi {
                self.scratch.push((j + 1, hi));
            }
            while let Some((a, b)) = self.scratch.pop() {
                let t = self.argmin(a, b);
                if vals[t] != level {
                    continue;
                }
                match signs[t] {
                    None => return Err(ConditionCFailure::UnsignedMinimum(gap + 1).into()),
                    Some(s) if s != sign => {
                        return Err(ConditionCFailure::SignConflict(gap + 1).into())
                    }
                    _ => {}
                }
                if t > a {
                    self.scratch.push((a, t - 1));
                }
                if t < b {
                    self.scratch.push((t + 1, b));
                }
            }
            self.mins.push(level);
            self.interval_signs.push(Some(sign));
        }
        Ok(())
    }

    /// Splits blocks of points at their lowest gaps, writing the preorder
    /// arities and signs of the extracted tree.
    fn build(&mut self, k: usize, signed: bool) -> Result<()> {
        self.arity.clear();
        self.tree_signs.clear();
        self.blocks.clear();
        self.blocks.push((0, k - 1));
        while let Some((a, b)) = self.blocks.pop() {
            if a == b {
                self.arity.push(0);
                self.tree_signs.push(None);
                continue;
            }
            let low = self.mins[a..b].iter().copied().fold(f64::INFINITY, f64::min);
            self.ties.clear();
            self.ties.extend((a..b).filter(|&g| self.mins[g] == low));
            let sign = if signed {
                let first = self.ties[0];
                let s = self.interval_signs[first];
                if let Some(&g) = self.ties.iter().find(|&&g| self.interval_signs[g] != s) {
                    return Err(ConditionCFailure::TiedMinimaConflict(first + 1, g + 1).into());
                }
                s
            } else {
                None
            };
            self.arity.push(self.ties.len() as u32 + 1);
            self.tree_signs.push(sign);
            let mut hi = b;
            for &g in self.ties.iter().rev() {
                self.blocks.push((g + 1, hi));
                hi = g;
            }
            self.blocks.push((a, hi));
        }
        Ok(())
    }

    /// `Tree(f, x)` for sorted points `x`.
    pub fn tree(&mut self, x: &[f64]) -> Result<SchroderTree> {
        self.interval_minima(x, false)?;
        self.build(x.len(), false)?;
        SchroderTree::from_arities(self.arity.clone())
    }

    /// `Tree±(f, s, x)` for sorted points `x`.
    pub fn signed_tree(&mut self, x: &[f64]) -> Result<SignedTree> {
        if self.signs.is_none() {
            return Err(Error::InvalidArgument("extractor has no signs".into()));
        }
        self.interval_minima(x, true)?;
        self.build(x.len(), true)?;
        let tree = SchroderTree::from_arities(self.arity.clone())?;
        SignedTree::new(tree, self.tree_signs.clone())
    }

    /// `Perm(f, s, x)` for sorted points `x`.
    pub fn perm(&mut self, x: &[f64]) -> Result<Permutation> {
        Ok(self.signed_tree(x)?.perm())
    }
}

fn validate_points(x: &[f64]) -> Result<()> {
    if x.is_empty() {
        return Err(Error::InvalidArgument("at least one point needed".into()));
    }
    if x.iter().any(|p| !(0.0..=1.0).contains(p)) {
        return Err(Error::InvalidArgument("points must lie in [0,1]".into()));
    }
    if x.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::InvalidArgument("points must be sorted".into()));
    }
    Ok(())
}

pub fn extract_tree(f: &Excursion, x: &[f64]) -> Result<SchroderTree> {
    Extractor::new(f).tree(x)
}

pub fn extract_signed_tree(s: &SignedExcursion, x: &[f64]) -> Result<SignedTree> {
    Extractor::signed(s).signed_tree(x)
}

pub fn extract_perm(s: &SignedExcursion, x: &[f64]) -> Result<Permutation> {
    Extractor::signed(s).perm(x)
}

/// Hit and failure counts of a Monte Carlo extraction estimate.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct MatchCounts {
    pub trials: u64,
    pub hits: u64,
    /// Draws where the sign condition failed; these count as non-matches.
    pub failures: u64,
}

impl MatchCounts {
    pub fn estimate(&self) -> f64 {
        self.hits as f64 / self.trials as f64
    }
}

/// Fills `out` with independent draws from `law`, sorted.
pub fn sample_points<R: Rng + ?Sized>(law: &DistributionFunction, rng: &mut R, out: &mut [f64]) {
    for p in out.iter_mut() {
        *p = law.sample(rng);
    }
    out.sort_unstable_by(f64::total_cmp);
}

/// Estimate of `PrTree(t0, f, F)`.
pub fn pr_tree<R: Rng + ?Sized>(
    t0: &SchroderTree,
    f: &Excursion,
    law: &DistributionFunction,
    trials: u64,
    rng: &mut R,
) -> Result<f64> {
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be at least 1".into()));
    }
    let mut ex = Extractor::new(f);
    let mut x = vec![0.0; t0.size()];
    let mut hits = 0u64;
    for _ in 0..trials {
        sample_points(law, rng, &mut x);
        if ex.tree(&x)? == *t0 {
            hits += 1;
        }
    }
    Ok(hits as f64 / trials as f64)
}

/// Estimate of `PrPerm(π, f, s, F)`.
pub fn pr_perm<R: Rng + ?Sized>(
    pattern: &Permutation,
    s: &SignedExcursion,
    law: &DistributionFunction,
    trials: u64,
    rng: &mut R,
) -> Result<f64> {
    Ok(pr_perm_counts(pattern, s, law, trials, rng)?.estimate())
}

pub fn pr_perm_counts<R: Rng + ?Sized>(
    pattern: &Permutation,
    s: &SignedExcursion,
    law: &DistributionFunction,
    trials: u64,
    rng: &mut R,
) -> Result<MatchCounts> {
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be at least 1".into()));
    }
    let mut ex = Extractor::signed(s);
    let mut x = vec![0.0; pattern.size()];
    let mut counts = MatchCounts {
        trials,
        ..MatchCounts::default()
    };
    for _ in 0..trials {
        sample_points(law, rng, &mut x);
        match ex.perm(&x) {
            Ok(p) if p == *pattern => counts.hits += 1,
            Ok(_) => {}
            Err(Error::ConditionC(_)) => counts.failures += 1,
            Err(e) => return Err(e),
        }
    }
    Ok(counts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::{for_each_combination, occ_exact};
    use crate::rational::to_f64;
    use crate::tree::all_trees;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn p(s: &str) -> Permutation {
        Permutation::parse_pattern(s).unwrap()
    }

    /// Two-level excursion with minima at grid points 2, 4 and 6.
    fn four_leaf_example() -> SignedExcursion {
        let f = Excursion::new(vec![0.0, 3.0, 1.0, 4.0, 0.5, 5.0, 2.0, 2.5, 0.0]).unwrap();
        SignedExcursion::with_minima_signs(f, &[Sign::Plus, Sign::Plus, Sign::Minus]).unwrap()
    }

    #[test]
    fn validation() {
        assert!(Excursion::new(vec![0.0]).is_err());
        assert!(Excursion::new(vec![0.0, -1.0, 0.0]).is_err());
        assert!(Excursion::new(vec![1.0, 0.0]).is_err());
        assert!(Excursion::new(vec![0.0, f64::NAN, 0.0]).is_err());
        let f = Excursion::new(vec![0.0, 1.0, 0.0]).unwrap();
        assert!(f.strict_minima().is_empty());
        assert!(SignedExcursion::new(f.clone(), vec![None, Some(Sign::Plus), None]).is_err());
        assert!(SignedExcursion::with_minima_signs(f, &[Sign::Plus]).is_err());
    }

    #[test]
    fn interpolation() {
        let f = Excursion::new(vec![0.0, 2.0, 1.0, 0.0]).unwrap();
        assert_eq!(f.value_at(0.5 / 3.0), 1.0);
        assert_eq!(f.value_at(1.0 / 3.0), 2.0);
        assert_eq!(f.value_at(1.0), 0.0);
    }

    #[test]
    fn brownian_excursion_shape() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let f = sample_brownian_excursion(1000, &mut rng).unwrap();
        assert_eq!(f.grid(), 1000);
        assert_eq!(f.values()[0], 0.0);
        assert_eq!(f.values()[1000], 0.0);
        assert!(f.values()[1..1000].iter().all(|&v| v > 0.0));
        assert!(sample_brownian_excursion(1, &mut rng).is_err());
    }

    #[test]
    fn signs_sit_on_minima() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let f = sample_brownian_excursion(2000, &mut rng).unwrap();
        let minima = f.strict_minima();
        let s = assign_signs(f, &mut rng);
        let signed: Vec<usize> = (0..=2000).filter(|&i| s.sign_at(i).is_some()).collect();
        assert_eq!(signed, minima);
        let single = assign_signs(Excursion::new(vec![0.0, 1.0, 0.0]).unwrap(), &mut rng);
        assert!(single.signs().iter().all(Option::is_none));
    }

    #[test]
    fn four_point_extraction() {
        let s = four_leaf_example();
        let x = [1.0 / 8.0, 3.0 / 8.0, 5.0 / 8.0, 7.0 / 8.0];
        let t = extract_tree(s.excursion(), &x).unwrap();
        assert_eq!(t.to_string(), "((L L) (L L))");
        let st = extract_signed_tree(&s, &x).unwrap();
        assert_eq!(st.to_string(), "(+ (+ L L) (- L L))");
        assert_eq!(extract_perm(&s, &x).unwrap(), p("1243"));
        let sub = extract_signed_tree(&s, &[x[0], x[2]]).unwrap();
        assert_eq!(sub, st.induced_subtree(&[1, 3]).unwrap());
        assert_eq!(extract_perm(&s, &[0.3]).unwrap(), p("1"));
    }

    #[test]
    fn condition_failures() {
        let s = four_leaf_example();
        // Both points in the same linear piece: the minimum sits at an endpoint.
        let e = extract_perm(&s, &[0.2, 0.24]).unwrap_err();
        assert_eq!(e, Error::ConditionC(ConditionCFailure::BoundaryMinimum(1)));
        let e = extract_perm(&s, &[0.25, 0.25]).unwrap_err();
        assert_eq!(e, Error::ConditionC(ConditionCFailure::BoundaryMinimum(1)));
        // Equal minima with different signs.
        let f = Excursion::new(vec![0.0, 2.0, 1.0, 2.0, 1.0, 2.0, 0.0]).unwrap();
        let conflict = SignedExcursion::with_minima_signs(f.clone(), &[Sign::Plus, Sign::Minus])
            .unwrap();
        let e = extract_perm(&conflict, &[1.0 / 6.0, 5.0 / 6.0]).unwrap_err();
        assert_eq!(e, Error::ConditionC(ConditionCFailure::SignConflict(1)));
        let e = extract_perm(&conflict, &[1.0 / 6.0, 0.5, 5.0 / 6.0]).unwrap_err();
        assert_eq!(e, Error::ConditionC(ConditionCFailure::TiedMinimaConflict(1, 2)));
        let agree = SignedExcursion::with_minima_signs(f, &[Sign::Minus, Sign::Minus]).unwrap();
        let st = extract_signed_tree(&agree, &[1.0 / 6.0, 0.5, 5.0 / 6.0]).unwrap();
        assert_eq!(st.to_string(), "(- L L L)");
        // A flat bottom is not a strict minimum.
        let flat = Excursion::new(vec![0.0, 2.0, 1.0, 1.0, 2.0, 0.0]).unwrap();
        let flat = SignedExcursion::new(flat, vec![None; 6]).unwrap();
        let e = extract_perm(&flat, &[0.2, 0.8]).unwrap_err();
        assert_eq!(e, Error::ConditionC(ConditionCFailure::UnsignedMinimum(1)));
    }

    #[test]
    fn bad_points() {
        let s = four_leaf_example();
        assert!(extract_perm(&s, &[]).is_err());
        assert!(extract_perm(&s, &[0.5, 0.2]).is_err());
        assert!(extract_perm(&s, &[1.5]).is_err());
    }

    #[test]
    fn contour_extraction_gives_subtrees() {
        for t in all_trees(5) {
            for root in [Sign::Plus, Sign::Minus] {
                let st = SignedTree::alternating(t.clone(), root);
                let s = SignedExcursion::signed_contour(&st).unwrap();
                let leaves = st.tree().leaf_positions().unwrap();
                let mut ex = Extractor::signed(&s);
                for k in 1..=5 {
                    for_each_combination(5, k, |c| {
                        let x: Vec<f64> = c.iter().map(|&i| leaves[i]).collect();
                        let idx: Vec<usize> = c.iter().map(|&i| i + 1).collect();
                        let want = st.induced_subtree(&idx).unwrap();
                        assert_eq!(ex.signed_tree(&x).unwrap(), want);
                        assert_eq!(ex.tree(&x).unwrap(), *want.tree());
                        assert_eq!(ex.perm(&x).unwrap(), st.perm().pattern_at(&idx).unwrap());
                        true
                    });
                }
            }
        }
    }

    #[test]
    fn contour_estimate_matches_falling_factorial() {
        let st: SignedTree = "(+ (- L L L) L (- L L))".parse().unwrap();
        let n = st.size() as f64;
        let s = SignedExcursion::signed_contour(&st).unwrap();
        let law = st.tree().leaf_cdf().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let trials = 200_000;
        for pat in ["12", "21", "132", "321"] {
            let pi = p(pat);
            let k = pi.size() as i32;
            let falling: f64 = (0..k).map(|i| n - i as f64).product();
            let exact = falling / n.powi(k) * to_f64(&occ_exact(&pi, &st.perm()));
            let est = pr_perm(&pi, &s, &law, trials, &mut rng).unwrap();
            let sd = (exact * (1.0 - exact) / trials as f64).sqrt();
            assert!((est - exact).abs() <= 4.0 * sd + 1e-12, "{pat}: {est} vs {exact}");
        }
        let one = pr_perm(&p("1"), &s, &DistributionFunction::Uniform, 100, &mut rng).unwrap();
        assert_eq!(one, 1.0);
        let none = pr_perm(&p("2413"), &s, &law, 10_000, &mut rng).unwrap();
        assert_eq!(none, 0.0);
    }

    #[test]
    fn pr_tree_on_contour() {
        let st: SignedTree = "(+ (- L L L) L (- L L))".parse().unwrap();
        let t = st.tree();
        let law = t.leaf_cdf().unwrap();
        let f = t.contour().unwrap();
        let cherry_left: SchroderTree = "((L L) L)".parse().unwrap();
        let mut hits = 0u32;
        for_each_combination(6, 3, |c| {
            let idx: Vec<usize> = c.iter().map(|&i| i + 1).collect();
            if t.induced_subtree(&idx).unwrap() == cherry_left {
                hits += 1;
            }
            true
        });
        assert_eq!(hits, 9);
        // Ordered draws of distinct leaves contribute 3! per subset. A draw
        // {a, a, b} with a < b also yields this shape, since the repeated
        // leaf forms a cherry above the gap to b: 3 orders for each of the
        // 15 pairs.
        let exact = (6.0 * hits as f64 + 45.0) / 216.0;
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let est = pr_tree(&cherry_left, &f, &law, 100_000, &mut rng).unwrap();
        assert!((est - exact).abs() < 0.01, "{est} vs {exact}");
    }

    #[test]
    fn scaling_constant() {
        let l = contour_scaling_constant();
        assert!((l * l - (2.0 + 3.0 / 2f64.sqrt())).abs() < 1e-12);
    }
}
