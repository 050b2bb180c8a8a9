//! Symmetric corked rooted trees.
//!
//! Internal vertices have at least two children and carry a Barratt–Eccles
//! tuple of matching arity; corks are unlabelled arity-zero vertices.
//! Leaves carry 1-based input indices.
//!
//! Degree is `#corks + Σ_v (r_v + 1)`, weight counts every vertex including
//! corks, and arity counts the (non-cork) leaves.
//!
//! Trees are kept in canonical form: children sorted by their smallest leaf,
//! leafless subtrees last in structural order. Reordering the children of a
//! vertex by `π` replaces its label `w` by `w ∘ π`, so
//! `c^{w∘π}(t_{π(1)}, …, t_{π(m)})` and `c^w(t_1, …, t_m)` are the same tree.

use std::collections::{BTreeSet, HashMap};

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::barratt_eccles::BETuple;
use crate::error::{Error, Result};
use crate::lin::Lin;
use crate::permutations::Permutation;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Tree {
    Leaf {
        leaf: usize,
    },
    Cork {
        cork: CorkMarker,
    },
    Vertex {
        label: BETuple,
        children: Vec<Tree>,
    },
}

/// Serializes as `true` so that a cork reads `{"cork": true}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct CorkMarker;

impl Serialize for CorkMarker {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_bool(true)
    }
}

impl<'de> Deserialize<'de> for CorkMarker {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        if bool::deserialize(d)? {
            Ok(CorkMarker)
        } else {
            Err(serde::de::Error::custom("\"cork\" must be true"))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeStats {
    pub degree: usize,
    pub weight: usize,
    pub arity: usize,
}

impl Tree {
    pub fn leaf(k: usize) -> Tree {
        Tree::Leaf { leaf: k }
    }

    pub fn cork() -> Tree {
        Tree::Cork { cork: CorkMarker }
    }

    /// The trivial tree: a single leaf and no vertices.
    pub fn trivial() -> Tree {
        Tree::leaf(1)
    }

    /// Builds a vertex, checking its shape, and canonicalizes.
    pub fn vertex(label: BETuple, children: Vec<Tree>) -> Result<Tree> {
        let t = Tree::Vertex { label, children };
        t.validate()?;
        Ok(t.canonical())
    }

    /// The corolla `c_n^w` with leaves `1..=n`.
    pub fn corolla(label: BETuple) -> Result<Tree> {
        let n = label.arity();
        if n == 0 {
            return Ok(Tree::cork());
        }
        Tree::vertex(label, (1..=n).map(Tree::leaf).collect())
    }

    pub fn is_cork(&self) -> bool {
        matches!(self, Tree::Cork { .. })
    }

    /// Structural validity: vertex shapes and a bijective leaf numbering.
    pub fn validate(&self) -> Result<()> {
        self.validate_shape()?;
        let mut leaves = self.leaf_labels();
        leaves.sort_unstable();
        if leaves.iter().enumerate().any(|(j, &l)| l != j + 1) {
            return Err(Error::InvalidTree(format!("leaves {leaves:?} are not 1..=n")));
        }
        Ok(())
    }

    fn validate_shape(&self) -> Result<()> {
        if let Tree::Vertex { label, children } = self {
            if children.len() < 2 {
                return Err(Error::InvalidTree(format!(
                    "vertex with {} children (need at least 2, or a cork)",
                    children.len()
                )));
            }
            if label.arity() != children.len() {
                return Err(Error::InvalidTree(format!(
                    "label arity {} but {} children",
                    label.arity(),
                    children.len()
                )));
            }
            for c in children {
                c.validate_shape()?;
            }
        }
        Ok(())
    }

    pub fn stats(&self) -> TreeStats {
        match self {
            Tree::Leaf { .. } => TreeStats { degree: 0, weight: 0, arity: 1 },
            Tree::Cork { .. } => TreeStats { degree: 1, weight: 1, arity: 0 },
            Tree::Vertex { label, children } => {
                let mut s = TreeStats { degree: label.degree() + 1, weight: 1, arity: 0 };
                for c in children {
                    let cs = c.stats();
                    s.degree += cs.degree;
                    s.weight += cs.weight;
                    s.arity += cs.arity;
                }
                s
            }
        }
    }

    pub fn degree(&self) -> usize {
        self.stats().degree
    }

    pub fn arity(&self) -> usize {
        self.stats().arity
    }

    /// Leaf indices in depth-first order.
    pub fn leaf_labels(&self) -> Vec<usize> {
        let mut out = vec![];
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves(&self, out: &mut Vec<usize>) {
        match self {
            Tree::Leaf { leaf } => out.push(*leaf),
            Tree::Cork { .. } => {}
            Tree::Vertex { children, .. } => children.iter().for_each(|c| c.collect_leaves(out)),
        }
    }

    fn min_leaf(&self) -> Option<usize> {
        match self {
            Tree::Leaf { leaf } => Some(*leaf),
            Tree::Cork { .. } => None,
            Tree::Vertex { children, .. } => children.iter().filter_map(Tree::min_leaf).min(),
        }
    }

    /// Applies `f` to every leaf index.
    pub fn relabel_leaves(&self, f: &impl Fn(usize) -> usize) -> Tree {
        match self {
            Tree::Leaf { leaf } => Tree::leaf(f(*leaf)),
            Tree::Cork { .. } => Tree::cork(),
            Tree::Vertex { label, children } => Tree::Vertex {
                label: label.clone(),
                children: children.iter().map(|c| c.relabel_leaves(f)).collect(),
            },
        }
    }

    pub fn canonical(&self) -> Tree {
        match self {
            Tree::Vertex { label, children } => {
                let children: Vec<Tree> = children.iter().map(Tree::canonical).collect();
                let mut order: Vec<usize> = (0..children.len()).collect();
                order.sort_by(|&a, &b| child_key(&children[a]).cmp(&child_key(&children[b])));
                let pi = Permutation::new(order.iter().map(|&j| j + 1).collect()).expect("bijection");
                let children: Vec<Tree> = order.into_iter().map(|j| children[j].clone()).collect();
                Tree::Vertex { label: least_label(&label.right_act(&pi), &children), children }
            }
            t => t.clone(),
        }
    }

    /// Leaf-like positions (leaves and corks) in depth-first order.
    fn leaf_like_count(&self) -> usize {
        match self {
            Tree::Vertex { children, .. } => children.iter().map(Tree::leaf_like_count).sum(),
            _ => 1,
        }
    }

    fn leaf_like_at(&self, pos: &mut usize) -> Option<&Tree> {
        match self {
            Tree::Vertex { children, .. } => children.iter().find_map(|c| c.leaf_like_at(pos)),
            t => {
                if *pos == 1 {
                    Some(t)
                } else {
                    *pos -= 1;
                    None
                }
            }
        }
    }

    fn substitute_leaf(&self, j: usize, inner: &Tree) -> Tree {
        match self {
            Tree::Leaf { leaf } if *leaf == j => inner.clone(),
            Tree::Vertex { label, children } => Tree::Vertex {
                label: label.clone(),
                children: children.iter().map(|c| c.substitute_leaf(j, inner)).collect(),
            },
            t => t.clone(),
        }
    }
}


/// The least relabelling of `label` by permutations of equal siblings.
fn least_label(label: &BETuple, children: &[Tree]) -> BETuple {
    let mut runs: Vec<Vec<usize>> = vec![];
    for (j, c) in children.iter().enumerate() {
        match runs.last_mut() {
            Some(run) if children[run[0]] == *c => run.push(j),
            _ => runs.push(vec![j]),
        }
    }
    if runs.iter().all(|r| r.len() == 1) {
        return label.clone();
    }
    runs.iter()
        .map(|run| run.iter().copied().permutations(run.len()).collect::<Vec<_>>())
        .multi_cartesian_product()
        .map(|blocks| {
            let images: Vec<usize> = blocks.concat().into_iter().map(|j| j + 1).collect();
            label.right_act(&Permutation::new(images).expect("bijection"))
        })
        .min()
        .expect("identity is in the stabilizer")
}

fn child_key(t: &Tree) -> (bool, usize, &Tree) {
    match t.min_leaf() {
        Some(m) => (false, m, t),
        None => (true, 0, t),
    }
}

/// Grafts `inner` onto the leaf-like position `position` (1-based, depth
/// first, corks included) of `outer`. Leaves of `inner` take the indices
/// starting at the replaced leaf; later leaves of `outer` shift up.
pub fn graft(outer: &Tree, inner: &Tree, position: usize) -> Result<Tree> {
    let max = outer.leaf_like_count();
    if position == 0 || position > max {
        return Err(Error::IndexOutOfRange { index: position, max });
    }
    let mut pos = position;
    let j = match outer.leaf_like_at(&mut pos) {
        Some(Tree::Leaf { leaf }) => *leaf,
        _ => return Err(Error::GraftOntoCork),
    };
    let k = inner.arity();
    let inner = inner.relabel_leaves(&|l| l + j - 1);
    let outer = outer.relabel_leaves(&|l| if l > j { l + k - 1 } else if l == j { usize::MAX } else { l });
    Ok(outer.substitute_leaf(usize::MAX, &inner).canonical())
}

fn set_partitions(items: &[usize]) -> Vec<Vec<Vec<usize>>> {
    let Some((&first, rest)) = items.split_first() else {
        return vec![vec![]];
    };
    let mut out = vec![];
    for p in set_partitions(rest) {
        // `first` is the smallest element, so a fresh block goes in front
        let mut fresh = vec![vec![first]];
        fresh.extend(p.iter().cloned());
        out.push(fresh);
        for b in 0..p.len() {
            let mut q = p.clone();
            q[b].insert(0, first);
            q.sort_by_key(|blk| blk[0]);
            out.push(q);
        }
    }
    out
}

/// Bounded enumeration of canonical trees.
pub struct Enumerator {
    cap: usize,
    memo: HashMap<(Vec<usize>, usize), Vec<Tree>>,
}

impl Enumerator {
    pub fn new(cap: usize) -> Self {
        Self { cap, memo: HashMap::new() }
    }

    /// Canonical trees with leaf set `leaves` and degree ≤ `budget`,
    /// sorted by (degree, structure).
    pub fn trees(&mut self, leaves: &[usize], budget: usize) -> Result<Vec<Tree>> {
        let key = (leaves.to_vec(), budget);
        if let Some(v) = self.memo.get(&key) {
            return Ok(v.clone());
        }
        let mut out = vec![];
        match leaves.len() {
            0 if budget >= 1 => out.push(Tree::cork()),
            1 => out.push(Tree::leaf(leaves[0])),
            _ => {}
        }
        if budget >= 1 {
            let leafless = self.trees(&[], budget - 1)?;
            for blocks in set_partitions(leaves) {
                self.assemble(&blocks, &leafless, budget, &mut out)?;
            }
        }
        out.sort_by(|a, b| a.degree().cmp(&b.degree()).then_with(|| a.cmp(b)));
        out.dedup();
        if out.len() > self.cap {
            return Err(Error::CapExceeded {
                what: format!("trees on {} leaves of degree <= {budget}", leaves.len()),
                needed: out.len() as u128,
                cap: self.cap as u128,
            });
        }
        self.memo.insert(key, out.clone());
        Ok(out)
    }

    fn assemble(&mut self, blocks: &[Vec<usize>], leafless: &[Tree], budget: usize, out: &mut Vec<Tree>) -> Result<()> {
        // children for the leafed blocks, then a non-decreasing run of leafless ones
        let child_budget = budget - 1;
        let mut leafed: Vec<(Vec<Tree>, usize)> = vec![(vec![], 0)];
        for block in blocks {
            let mut next = vec![];
            for (prefix, used) in &leafed {
                for t in self.trees(block, child_budget - used)? {
                    let d = t.degree();
                    let mut p = prefix.clone();
                    p.push(t);
                    next.push((p, used + d));
                }
            }
            leafed = next;
        }
        for (prefix, used) in leafed {
            let mut stack: Vec<(Vec<Tree>, usize, usize)> = vec![(prefix, used, 0)];
            while let Some((children, used, start)) = stack.pop() {
                if children.len() >= 2 {
                    for r in 0..=(child_budget - used) {
                        for label in BETuple::all(children.len(), r) {
                            let label = least_label(&label, &children);
                            out.push(Tree::Vertex { label, children: children.clone() });
                        }
                        if out.len() > self.cap {
                            return Err(Error::CapExceeded {
                                what: "tree enumeration".into(),
                                needed: out.len() as u128,
                                cap: self.cap as u128,
                            });
                        }
                    }
                }
                for (idx, t) in leafless.iter().enumerate().skip(start) {
                    let d = t.degree();
                    if used + d <= child_budget {
                        let mut c = children.clone();
                        c.push(t.clone());
                        stack.push((c, used + d, idx));
                    }
                }
            }
        }
        Ok(())
    }
}

/// All canonical trees of arity `n` and degree ≤ `max_degree`, ordered by
/// degree and then structure.
pub fn enumerate_scrt(n: usize, max_degree: usize, cap: usize) -> Result<Vec<Tree>> {
    let leaves: Vec<usize> = (1..=n).collect();
    Enumerator::new(cap).trees(&leaves, max_degree)
}

/// A tree whose leaves are decorated by basis vectors: `decorations[j-1]`
/// sits on leaf `j`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TreeTerm {
    pub tree: Tree,
    pub decorations: Vec<usize>,
}

impl TreeTerm {
    pub fn new(tree: Tree, decorations: Vec<usize>) -> Result<Self> {
        tree.validate()?;
        if decorations.len() != tree.arity() {
            return Err(Error::SizeMismatch { expected: tree.arity(), got: decorations.len() });
        }
        Ok(Self { tree, decorations })
    }

    /// `Σ_j deg(g_{i_j}) - deg(τ)`.
    pub fn homological_degree(&self, basis_degree: impl Fn(usize) -> i64) -> i64 {
        self.decorations.iter().map(|&b| basis_degree(b)).sum::<i64>() - self.tree.degree() as i64
    }
}

/// A linear combination of decorated trees of degree at most `max_degree`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeSeries {
    pub max_degree: usize,
    pub terms: Lin<TreeTerm>,
}

impl TreeSeries {
    pub fn new(max_degree: usize) -> Self {
        Self { max_degree, terms: Lin::zero() }
    }

    pub fn push(&mut self, field: &crate::scalars::PrimeField, term: TreeTerm, coeff: u64) -> Result<()> {
        if term.tree.degree() > self.max_degree {
            return Err(Error::Degree(format!(
                "term of degree {} above truncation {}",
                term.tree.degree(),
                self.max_degree
            )));
        }
        self.terms.add_term(field, term, coeff);
        Ok(())
    }
}

/// Canonical forms of all leaf relabellings of `t`.
pub fn leaf_orbit(t: &Tree) -> BTreeSet<Tree> {
    let n = t.arity();
    Permutation::all(n)
        .into_iter()
        .map(|p| t.relabel_leaves(&|l| p.apply(l)).canonical())
        .collect()
}
