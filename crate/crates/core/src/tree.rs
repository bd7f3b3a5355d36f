//! Schröder trees, signed trees and the bijection with separable permutations.
//!
//! A tree is stored as the arity of each vertex in depth-first preorder,
//! which is also its Lukasiewicz code. Vertices are named by preorder rank
//! and leaves by their left-to-right index starting at 1.

use std::fmt;
use std::str::FromStr;

use crate::distribution::DistributionFunction;
use crate::error::{Error, Result};
use crate::excursion::Excursion;
use crate::perm::{normalize_index_set, Permutation};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn flip(self) -> Self {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Sign::Plus => '+',
            Sign::Minus => '-',
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

/// A plane tree whose internal vertices all have at least two children.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SchroderTree {
    arity: Vec<u32>,
    end: Vec<u32>,
    leaves: usize,
}

impl SchroderTree {
    pub fn leaf() -> Self {
        Self {
            arity: vec![0],
            end: vec![1],
            leaves: 1,
        }
    }

    /// Builds a tree from the arities of its vertices in preorder.
    pub fn from_arities(arity: Vec<u32>) -> Result<Self> {
        if arity.is_empty() {
            return Err(Error::InvalidTree("no vertices".into()));
        }
        let n = arity.len();
        let mut end = vec![0u32; n];
        // Stack of (vertex, children still to close).
        let mut stack: Vec<(usize, u32)> = Vec::new();
        let mut leaves = 0;
        for (v, &a) in arity.iter().enumerate() {
            if v > 0 && stack.is_empty() {
                return Err(Error::InvalidTree("trailing vertices after the root".into()));
            }
            if a == 1 {
                return Err(Error::InvalidTree(format!("vertex {v} has one child")));
            }
            if a == 0 {
                leaves += 1;
                end[v] = v as u32 + 1;
                close_finished(&mut stack, &mut end, v + 1);
            } else {
                stack.push((v, a));
            }
        }
        if !stack.is_empty() {
            return Err(Error::InvalidTree("missing children".into()));
        }
        Ok(Self { arity, end, leaves })
    }

    /// Joins subtrees under a new root.
    pub fn node(children: &[SchroderTree]) -> Result<Self> {
        if children.len() < 2 {
            return Err(Error::InvalidTree("internal vertex needs two children".into()));
        }
        let mut arity = vec![children.len() as u32];
        for c in children {
            arity.extend_from_slice(&c.arity);
        }
        Self::from_arities(arity)
    }

    /// Number of leaves `|t|`.
    pub fn size(&self) -> usize {
        self.leaves
    }

    /// Number of vertices `#t`.
    pub fn vertex_count(&self) -> usize {
        self.arity.len()
    }

    pub fn arities(&self) -> &[u32] {
        &self.arity
    }

    pub fn arity(&self, v: usize) -> usize {
        self.arity[v] as usize
    }

    pub fn is_leaf(&self, v: usize) -> bool {
        self.arity[v] == 0
    }

    pub fn is_binary(&self) -> bool {
        self.arity.iter().all(|&a| a == 0 || a == 2)
    }

    /// One past the last vertex of the subtree rooted at `v`.
    pub fn subtree_end(&self, v: usize) -> usize {
        self.end[v] as usize
    }

    pub fn children(&self, v: usize) -> Children<'_> {
        Children {
            tree: self,
            next: v + 1,
            stop: self.subtree_end(v),
        }
    }

    /// Preorder ranks of the leaves, left to right.
    pub fn leaf_vertices(&self) -> Vec<usize> {
        (0..self.vertex_count()).filter(|&v| self.is_leaf(v)).collect()
    }

    /// Parent of every vertex; the root maps to itself.
    pub fn parents(&self) -> Vec<usize> {
        let mut parent = vec![0usize; self.vertex_count()];
        for v in 0..self.vertex_count() {
            for c in self.children(v) {
                parent[c] = v;
            }
        }
        parent
    }

    pub fn depths(&self) -> Vec<u32> {
        let mut depth = vec![0u32; self.vertex_count()];
        for v in 0..self.vertex_count() {
            for c in self.children(v) {
                depth[c] = depth[v] + 1;
            }
        }
        depth
    }

    /// Leaf counts of every subtree.
    pub fn subtree_sizes(&self) -> Vec<usize> {
        let mut prefix = Vec::with_capacity(self.vertex_count() + 1);
        prefix.push(0usize);
        for &a in &self.arity {
            prefix.push(prefix.last().unwrap() + usize::from(a == 0));
        }
        (0..self.vertex_count())
            .map(|v| prefix[self.subtree_end(v)] - prefix[v])
            .collect()
    }

    /// Deepest vertex having leaves `i` and `j` (1-based, distinct) as descendants.
    pub fn common_ancestor(&self, i: usize, j: usize) -> Result<usize> {
        if i == j {
            return Err(Error::InvalidArgument("leaves must be distinct".into()));
        }
        let leaves = self.leaf_vertices();
        for &x in &[i, j] {
            if x == 0 || x > leaves.len() {
                return Err(Error::IndexOutOfRange {
                    index: x,
                    len: leaves.len(),
                });
            }
        }
        let (a, b) = (leaves[i.min(j) - 1], leaves[i.max(j) - 1]);
        let parent = self.parents();
        let mut v = a;
        while self.subtree_end(v) <= b {
            v = parent[v];
        }
        Ok(v)
    }

    /// The tree `t_I` spanned by the leaves in `I` (1-based).
    pub fn induced_subtree(&self, leaves: &[usize]) -> Result<Self> {
        let (arity, _) = self.induced_parts(leaves)?;
        Self::from_arities(arity)
    }

    /// Preorder arities of `t_I` together with the original vertex each new
    /// vertex comes from.
    pub(crate) fn induced_parts(&self, leaves: &[usize]) -> Result<(Vec<u32>, Vec<usize>)> {
        let idx = normalize_index_set(leaves, self.size())?;
        let n = self.vertex_count();
        let mut marked = vec![0u32; n];
        let leaf_v = self.leaf_vertices();
        for &i in &idx {
            marked[leaf_v[i - 1]] = 1;
        }
        let parent = self.parents();
        for v in (1..n).rev() {
            marked[parent[v]] += marked[v];
        }
        let mut arity = Vec::with_capacity(2 * idx.len());
        let mut origin = Vec::with_capacity(2 * idx.len());
        let mut v = 0;
        while v < n {
            if marked[v] == 0 {
                v = self.subtree_end(v);
                continue;
            }
            if self.is_leaf(v) {
                arity.push(0);
                origin.push(v);
            } else {
                let c = self.children(v).filter(|&c| marked[c] > 0).count() as u32;
                if c >= 2 {
                    arity.push(c);
                    origin.push(v);
                }
            }
            v += 1;
        }
        Ok((arity, origin))
    }

    /// Depths along the depth-first walk, at integer times `0..=2#t-2`.
    pub fn raw_contour(&self) -> Vec<u32> {
        self.contour_with_leaf_times().0
    }

    fn contour_with_leaf_times(&self) -> (Vec<u32>, Vec<usize>) {
        let depth = self.depths();
        let tour = self.euler_tour();
        let path = tour.iter().map(|&v| depth[v]).collect();
        let leaf_times = (0..tour.len()).filter(|&i| self.is_leaf(tour[i])).collect();
        (path, leaf_times)
    }

    /// The vertex visited at each time `0..=2#t-2` of the depth-first walk.
    pub fn euler_tour(&self) -> Vec<usize> {
        let parent = self.parents();
        let mut tour = Vec::with_capacity(2 * self.vertex_count() - 1);
        let mut stack = vec![0usize];
        tour.push(0);
        for v in 1..self.vertex_count() {
            while *stack.last().unwrap() != parent[v] {
                stack.pop();
                tour.push(*stack.last().unwrap());
            }
            stack.push(v);
            tour.push(v);
        }
        while stack.len() > 1 {
            stack.pop();
            tour.push(*stack.last().unwrap());
        }
        tour
    }

    /// The contour rescaled to `[0,1]` in time and divided by `sqrt(|t|)` in height.
    pub fn contour(&self) -> Result<Excursion> {
        self.require_two_leaves()?;
        let scale = (self.size() as f64).sqrt();
        let values = self.raw_contour().iter().map(|&h| h as f64 / scale).collect();
        Excursion::new(values)
    }

    /// Abscissae `ℓ_1 < ... < ℓ_|t|` of the leaves on the normalized contour.
    pub fn leaf_positions(&self) -> Result<Vec<f64>> {
        self.require_two_leaves()?;
        let m = (2 * self.vertex_count() - 2) as f64;
        let (_, times) = self.contour_with_leaf_times();
        Ok(times.iter().map(|&t| t as f64 / m).collect())
    }

    /// Integer contour times of the leaves; the grid has `2#t-2` steps.
    pub fn leaf_times(&self) -> Vec<usize> {
        self.contour_with_leaf_times().1
    }

    /// The leaf distribution function `F_t`.
    pub fn leaf_cdf(&self) -> Result<DistributionFunction> {
        self.require_two_leaves()?;
        let m = 2 * self.vertex_count() as u64 - 2;
        let times: Vec<u64> = self.leaf_times().iter().map(|&t| t as u64).collect();
        DistributionFunction::grid_step(m, times, vec![1; self.size()])
    }

    /// The Lukasiewicz path `R_0 = 0, ..., R_#t = -1`.
    pub fn lukasiewicz(&self) -> Vec<i64> {
        let mut path = Vec::with_capacity(self.vertex_count() + 1);
        let mut r = 0i64;
        path.push(r);
        for &a in &self.arity {
            r += a as i64 - 1;
            path.push(r);
        }
        path
    }

    fn require_two_leaves(&self) -> Result<()> {
        if self.size() < 2 {
            return Err(Error::InvalidTree(
                "normalized contour needs at least two leaves".into(),
            ));
        }
        Ok(())
    }

    fn write_with(
        &self,
        f: &mut fmt::Formatter<'_>,
        sign: impl Fn(usize) -> Option<Sign>,
    ) -> fmt::Result {
        let mut open: Vec<u32> = Vec::new();
        let mut spaced = false;
        for v in 0..self.vertex_count() {
            if spaced {
                f.write_str(" ")?;
            }
            spaced = true;
            if self.is_leaf(v) {
                f.write_str("L")?;
                while let Some(left) = open.last_mut() {
                    *left -= 1;
                    if *left > 0 {
                        break;
                    }
                    open.pop();
                    f.write_str(")")?;
                }
            } else {
                f.write_str("(")?;
                match sign(v) {
                    Some(s) => write!(f, "{s}")?,
                    None => spaced = false,
                }
                open.push(self.arity[v]);
            }
        }
        Ok(())
    }
}

/// Pops every vertex on the stack whose last child ends at `pos`.
fn close_finished(stack: &mut Vec<(usize, u32)>, end: &mut [u32], pos: usize) {
    while let Some(top) = stack.last_mut() {
        top.1 -= 1;
        if top.1 > 0 {
            break;
        }
        end[top.0] = pos as u32;
        stack.pop();
    }
}

pub struct Children<'a> {
    tree: &'a SchroderTree,
    next: usize,
    stop: usize,
}

impl Iterator for Children<'_> {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.next >= self.stop {
            return None;
        }
        let c = self.next;
        self.next = self.tree.subtree_end(c);
        Some(c)
    }
}

impl fmt::Display for SchroderTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_with(f, |_| None)
    }
}

impl FromStr for SchroderTree {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (arity, signs) = parse_tree(s)?;
        if signs.iter().any(Option::is_some) {
            return Err(Error::Parse("unsigned tree expected".into()));
        }
        Self::from_arities(arity)
    }
}

/// Reads the bracket notation into preorder arities and optional signs.
fn parse_tree(s: &str) -> Result<(Vec<u32>, Vec<Option<Sign>>)> {
    let mut arity = Vec::new();
    let mut signs = Vec::new();
    let mut open: Vec<usize> = Vec::new();
    let mut chars = s.chars().filter(|c| !c.is_whitespace()).peekable();
    let mut done = false;
    while let Some(c) = chars.next() {
        if done {
            return Err(Error::Parse(format!("unexpected {c:?} after the root")));
        }
        match c {
            'L' => {
                if let Some(&p) = open.last() {
                    arity[p] += 1;
                }
                arity.push(0);
                signs.push(None);
                done = open.is_empty();
            }
            '(' => {
                if let Some(&p) = open.last() {
                    arity[p] += 1;
                }
                let sign = match chars.peek() {
                    Some('+') => Some(Sign::Plus),
                    Some('-') => Some(Sign::Minus),
                    _ => None,
                };
                if sign.is_some() {
                    chars.next();
                }
                open.push(arity.len());
                arity.push(0);
                signs.push(sign);
            }
            ')' => {
                let v = open
                    .pop()
                    .ok_or_else(|| Error::Parse("unbalanced ')'".into()))?;
                if arity[v] < 2 {
                    return Err(Error::Parse("internal vertex needs two children".into()));
                }
                done = open.is_empty();
            }
            other => return Err(Error::Parse(format!("unexpected {other:?}"))),
        }
    }
    if !done {
        return Err(Error::Parse("incomplete tree".into()));
    }
    Ok((arity, signs))
}

/// A Schröder tree with a sign on every internal vertex.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SignedTree {
    tree: SchroderTree,
    signs: Vec<Option<Sign>>,
}

impl SignedTree {
    pub fn new(tree: SchroderTree, signs: Vec<Option<Sign>>) -> Result<Self> {
        if signs.len() != tree.vertex_count() {
            return Err(Error::InvalidTree("one sign slot per vertex expected".into()));
        }
        for (v, s) in signs.iter().enumerate() {
            if s.is_some() == tree.is_leaf(v) {
                return Err(Error::InvalidTree(format!(
                    "vertex {v}: signs belong exactly to internal vertices"
                )));
            }
        }
        Ok(Self { tree, signs })
    }

    pub fn leaf() -> Self {
        Self {
            tree: SchroderTree::leaf(),
            signs: vec![None],
        }
    }

    /// Signs alternate along every edge, starting from `root` at the root.
    pub fn alternating(tree: SchroderTree, root: Sign) -> Self {
        let depth = tree.depths();
        let signs = (0..tree.vertex_count())
            .map(|v| {
                (!tree.is_leaf(v)).then(|| if depth[v] % 2 == 0 { root } else { root.flip() })
            })
            .collect();
        Self { tree, signs }
    }

    pub fn tree(&self) -> &SchroderTree {
        &self.tree
    }

    pub fn into_tree(self) -> SchroderTree {
        self.tree
    }

    pub fn sign(&self, v: usize) -> Option<Sign> {
        self.signs[v]
    }

    pub fn signs(&self) -> &[Option<Sign>] {
        &self.signs
    }

    pub fn size(&self) -> usize {
        self.tree.size()
    }

    /// True when no internal vertex has an internal child of the same sign.
    pub fn is_alternating(&self) -> bool {
        (0..self.tree.vertex_count()).all(|v| {
            self.tree
                .children(v)
                .all(|c| self.signs[c].is_none() || self.signs[c] != self.signs[v])
        })
    }

    /// The permutation `perm(t, ε)`.
    pub fn perm(&self) -> Permutation {
        let t = &self.tree;
        let size = t.subtree_sizes();
        let mut base = vec![0u32; t.vertex_count()];
        let mut out = Vec::with_capacity(t.size());
        for v in 0..t.vertex_count() {
            if t.is_leaf(v) {
                out.push(base[v] + 1);
                continue;
            }
            let mut offset = 0u32;
            let total = size[v] as u32;
            for c in t.children(v) {
                let sc = size[c] as u32;
                base[c] = match self.signs[v] {
                    Some(Sign::Minus) => base[v] + total - offset - sc,
                    _ => base[v] + offset,
                };
                offset += sc;
            }
        }
        Permutation::from_vec_unchecked(out)
    }

    /// The signed tree `(t_I, ε_I)` spanned by the leaves in `I` (1-based).
    pub fn induced_subtree(&self, leaves: &[usize]) -> Result<Self> {
        let (arity, origin) = self.tree.induced_parts(leaves)?;
        let signs = origin.iter().map(|&v| self.signs[v]).collect();
        Self::new(SchroderTree::from_arities(arity)?, signs)
    }

    /// Sign of the deepest common ancestor of leaves `i` and `j`.
    pub fn ancestor_sign(&self, i: usize, j: usize) -> Result<Sign> {
        let v = self.tree.common_ancestor(i, j)?;
        Ok(self.signs[v].expect("common ancestors are internal"))
    }

    /// Merges every internal child into its parent when both carry the same
    /// sign. The permutation is unchanged and the result alternates.
    pub fn canonical(&self) -> Self {
        let t = &self.tree;
        let n = t.vertex_count();
        let parent = t.parents();
        let absorbed: Vec<bool> = (0..n)
            .map(|v| v > 0 && !t.is_leaf(v) && self.signs[v] == self.signs[parent[v]])
            .collect();
        // Arity of a kept vertex counts children, replacing absorbed ones by
        // their own (recursively expanded) children.
        let mut eff = vec![0u32; n];
        for v in (0..n).rev() {
            if t.is_leaf(v) {
                continue;
            }
            eff[v] = t
                .children(v)
                .map(|c| if absorbed[c] { eff[c] } else { 1 })
                .sum();
        }
        let mut arity = Vec::with_capacity(n);
        let mut signs = Vec::with_capacity(n);
        for v in 0..n {
            if !absorbed[v] {
                arity.push(eff[v]);
                signs.push(self.signs[v]);
            }
        }
        let tree = SchroderTree::from_arities(arity).expect("merging keeps a valid tree");
        Self { tree, signs }
    }
}

impl fmt::Display for SignedTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.tree.write_with(f, |v| self.signs[v])
    }
}

impl FromStr for SignedTree {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (arity, signs) = parse_tree(s)?;
        Self::new(SchroderTree::from_arities(arity)?, signs)
    }
}

/// The alternating signed tree whose permutation is `sigma`.
pub fn decomposition_tree(sigma: &Permutation) -> Result<SignedTree> {
    let s = sigma.values();
    let mut arity = Vec::with_capacity(2 * s.len());
    let mut signs = Vec::with_capacity(2 * s.len());
    let mut stack = vec![(0usize, s.len())];
    let mut cuts = Vec::new();
    while let Some((lo, len)) = stack.pop() {
        if len == 1 {
            arity.push(0);
            signs.push(None);
            continue;
        }
        let block = &s[lo..lo + len];
        let min = *block.iter().min().expect("blocks are nonempty");
        let sign = if split_points(block, &mut cuts, |pmax, _, i| pmax == min + i - 1) {
            Sign::Plus
        } else if split_points(block, &mut cuts, |_, pmin, i| {
            pmin == min + (len as u32 - i)
        }) {
            Sign::Minus
        } else {
            return Err(Error::NotSeparable);
        };
        arity.push(cuts.len() as u32 + 1);
        signs.push(Some(sign));
        let mut bounds = Vec::with_capacity(cuts.len() + 2);
        bounds.push(0);
        bounds.extend_from_slice(&cuts);
        bounds.push(len);
        for w in bounds.windows(2).rev() {
            stack.push((lo + w[0], w[1] - w[0]));
        }
    }
    let tree = SchroderTree::from_arities(arity)?;
    SignedTree::new(tree, signs)
}

/// Collects prefix lengths `i` in `1..len` where `test(prefix max, prefix
/// min, i)` holds. Returns whether any was found.
fn split_points(
    block: &[u32],
    cuts: &mut Vec<usize>,
    test: impl Fn(u32, u32, u32) -> bool,
) -> bool {
    cuts.clear();
    let (mut pmax, mut pmin) = (0u32, u32::MAX);
    for (i, &v) in block[..block.len() - 1].iter().enumerate() {
        pmax = pmax.max(v);
        pmin = pmin.min(v);
        if test(pmax, pmin, i as u32 + 1) {
            cuts.push(i + 1);
        }
    }
    !cuts.is_empty()
}

/// Every Schröder tree with `n` leaves, in a fixed order. Feasible for small
/// `n` only.
pub fn all_trees(n: usize) -> Vec<SchroderTree> {
    let mut memo: Vec<Vec<Vec<u32>>> = vec![Vec::new(), vec![vec![0]]];
    for m in 2..=n {
        let mut out = Vec::new();
        let mut parts = Vec::new();
        compositions(m, &mut parts, &mut |parts| {
            if parts.len() < 2 {
                return;
            }
            let mut acc: Vec<Vec<u32>> = vec![vec![parts.len() as u32]];
            for &p in parts.iter() {
                acc = acc
                    .iter()
                    .flat_map(|prefix| {
                        memo[p].iter().map(move |sub| {
                            let mut v = prefix.clone();
                            v.extend_from_slice(sub);
                            v
                        })
                    })
                    .collect();
            }
            out.extend(acc);
        });
        memo.push(out);
    }
    if n == 0 {
        return Vec::new();
    }
    memo.swap_remove(n)
        .into_iter()
        .map(|a| SchroderTree::from_arities(a).expect("enumerated trees are valid"))
        .collect()
}

fn compositions(n: usize, parts: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
    if n == 0 {
        f(parts);
        return;
    }
    for first in 1..=n {
        parts.push(first);
        compositions(n - first, parts, f);
        parts.pop();
    }
}

/// Every binary plane tree with `n` leaves.
pub fn all_binary_trees(n: usize) -> Vec<SchroderTree> {
    all_trees(n).into_iter().filter(SchroderTree::is_binary).collect()
}
