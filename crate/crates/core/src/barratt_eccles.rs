//! The Barratt–Eccles operad `E` on tuples of pairwise-distinct
//! permutations, and its arity-wise linear dual `E*`.
//!
//! A basis tuple `(σ_0, …, σ_r)` of arity `n` has simplicial degree `r`.
//! Both `E` and `E*` use the same basis, paired by the Kronecker pairing,
//! so every map here has an explicit transpose that the tests check.
//!
//! Sign conventions (pinned by the exhaustive co-Leibniz test at odd p):
//! the differential of a tensor is `d(x⊗y) = dx⊗y + (-1)^{deg x} x⊗dy`
//! with `deg x = r_x`, the unshifted simplicial degree.

use std::fmt;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lin::Lin;
use crate::permutations::Permutation;
use crate::scalars::PrimeField;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "RawTuple", into = "RawTuple")]
pub struct BETuple {
    arity: usize,
    perms: Vec<Permutation>,
}

#[derive(Serialize, Deserialize)]
struct RawTuple {
    arity: usize,
    perms: Vec<Permutation>,
}

impl TryFrom<RawTuple> for BETuple {
    type Error = Error;
    fn try_from(raw: RawTuple) -> Result<Self> {
        BETuple::new(raw.arity, raw.perms)
    }
}

impl From<BETuple> for RawTuple {
    fn from(t: BETuple) -> RawTuple {
        RawTuple { arity: t.arity, perms: t.perms }
    }
}

impl BETuple {
    pub fn new(arity: usize, perms: Vec<Permutation>) -> Result<Self> {
        if perms.is_empty() {
            return Err(Error::InvalidTuple("empty tuple".into()));
        }
        if let Some(p) = perms.iter().find(|p| p.size() != arity) {
            return Err(Error::InvalidTuple(format!("{p:?} does not have size {arity}")));
        }
        if !perms.iter().all_unique() {
            return Err(Error::InvalidTuple(format!("repeated entry in {perms:?}")));
        }
        Ok(Self { arity, perms })
    }

    /// Builds a tuple, returning `None` when an entry repeats.
    pub fn try_distinct(arity: usize, perms: Vec<Permutation>) -> Option<Self> {
        if perms.iter().all_unique() {
            Some(Self { arity, perms })
        } else {
            None
        }
    }

    /// The degree-zero tuple `(id_n)`; for `n ≤ 1` this is the only tuple.
    pub fn identity(arity: usize) -> Self {
        Self { arity, perms: vec![Permutation::identity(arity)] }
    }

    pub fn from_images(arity: usize, perms: &[&[usize]]) -> Result<Self> {
        let perms = perms.iter().map(|p| Permutation::new(p.to_vec())).collect::<Result<Vec<_>>>()?;
        Self::new(arity, perms)
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn degree(&self) -> usize {
        self.perms.len() - 1
    }

    pub fn perms(&self) -> &[Permutation] {
        &self.perms
    }

    /// `(σ_0 ∘ π, …, σ_r ∘ π)`: relabels inputs (positions).
    pub fn right_act(&self, pi: &Permutation) -> BETuple {
        let perms = self.perms.iter().map(|s| s.compose(pi).expect("same arity")).collect();
        BETuple { arity: self.arity, perms }
    }

    /// `(π ∘ σ_0, …, π ∘ σ_r)`.
    pub fn left_act(&self, pi: &Permutation) -> BETuple {
        let perms = self.perms.iter().map(|s| pi.compose(s).expect("same arity")).collect();
        BETuple { arity: self.arity, perms }
    }

    /// The orbit representative under the right action (first entry the
    /// identity) together with the `π` with `self = rep.right_act(π)`.
    pub fn normalize(&self) -> (BETuple, Permutation) {
        let pi = self.perms[0].clone();
        (self.right_act(&pi.inverse()), pi)
    }

    pub fn is_normalized(&self) -> bool {
        self.perms[0].is_identity()
    }

    /// Every tuple of `r + 1` pairwise-distinct permutations of `S_n`.
    pub fn all(arity: usize, degree: usize) -> Vec<BETuple> {
        Permutation::all(arity)
            .into_iter()
            .permutations(degree + 1)
            .map(|perms| BETuple { arity, perms })
            .collect()
    }

    /// All tuples with first entry the identity.
    pub fn all_normalized(arity: usize, degree: usize) -> Vec<BETuple> {
        let id = Permutation::identity(arity);
        let rest: Vec<_> = Permutation::all(arity).into_iter().filter(|p| p != &id).collect();
        rest.into_iter()
            .permutations(degree)
            .map(|tail| {
                let mut perms = vec![id.clone()];
                perms.extend(tail);
                BETuple { arity, perms }
            })
            .collect()
    }
}

impl fmt::Debug for BETuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (j, p) in self.perms.iter().enumerate() {
            if j > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p:?}")?;
        }
        write!(f, ")")
    }
}

pub type BEElement = Lin<BETuple>;
pub type BETensor = Lin<(BETuple, BETuple)>;

/// Range of insertion spots used by the dual differential.
///
/// `Full` inserts at every spot `0..=r+1` and is the transpose of the
/// alternating face map; `Displayed` inserts at spots `0..=r` only.
/// Both square to zero and both commute with decompositions `Δ_i^{n,k}`
/// for `k ≥ 1`; only `Full` commutes with decomposition through a cork.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InsertionRange {
    #[default]
    Full,
    Displayed,
}

impl InsertionRange {
    fn last_spot(self, degree: usize) -> usize {
        match self {
            InsertionRange::Full => degree + 1,
            InsertionRange::Displayed => degree,
        }
    }
}

/// `d₂(σ_0,…,σ_r) = Σ_{σ ∉ {σ_j}} Σ_i (-1)^i (σ_0,…,σ,…,σ_r)`, σ at spot i.
pub fn dual_differential(field: &PrimeField, w: &BETuple, range: InsertionRange) -> BEElement {
    let mut out = Lin::zero();
    for sigma in Permutation::all(w.arity) {
        if w.perms.contains(&sigma) {
            continue;
        }
        for spot in 0..=range.last_spot(w.degree()) {
            let mut perms = w.perms.clone();
            perms.insert(spot, sigma.clone());
            out.add_term(field, BETuple { arity: w.arity, perms }, field.sign(spot as i64));
        }
    }
    out
}

/// Transpose of [`dual_differential`]: alternating sum of deletions.
pub fn be_differential(field: &PrimeField, w: &BETuple, range: InsertionRange) -> BEElement {
    let mut out = Lin::zero();
    let r = w.degree();
    if r == 0 {
        return out;
    }
    // deleting spot i from degree r undoes an insertion at spot i into degree r-1
    for spot in 0..=r {
        if spot > range.last_spot(r - 1) {
            continue;
        }
        let mut perms = w.perms.clone();
        perms.remove(spot);
        out.add_term(field, BETuple { arity: w.arity, perms }, field.sign(spot as i64));
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Step {
    H,
    V,
}

/// A monotone lattice path from `(0,0)` to `(a,b)`.
pub type LatticePath = Vec<Step>;

/// All lattice paths with `a` horizontal and `b` vertical steps.
pub fn lattice_paths(a: usize, b: usize) -> Vec<LatticePath> {
    (0..a + b)
        .combinations(a)
        .map(|hs| {
            let mut path = vec![Step::V; a + b];
            for h in hs {
                path[h] = Step::H;
            }
            path
        })
        .collect()
}

/// Sign of the shuffle moving every horizontal step before every vertical one.
pub fn lattice_sign(field: &PrimeField, path: &[Step]) -> u64 {
    let mut verticals = 0i64;
    let mut crossings = 0i64;
    for s in path {
        match s {
            Step::V => verticals += 1,
            Step::H => crossings += verticals,
        }
    }
    field.sign(crossings)
}

/// Partial composition `x ∘_i y` in `E`, summed over lattice paths.
pub fn partial_compose(field: &PrimeField, x: &BETuple, y: &BETuple, i: usize) -> Result<BEElement> {
    let n = x.arity;
    if i == 0 || i > n {
        return Err(Error::IndexOutOfRange { index: i, max: n });
    }
    let (a, b) = (x.degree(), y.degree());
    let mut out = Lin::zero();
    for path in lattice_paths(a, b) {
        let (mut u, mut v) = (0, 0);
        let mut perms = vec![x.perms[0].block_compose(&y.perms[0], i)?];
        for step in &path {
            match step {
                Step::H => u += 1,
                Step::V => v += 1,
            }
            perms.push(x.perms[u].block_compose(&y.perms[v], i)?);
        }
        // only composition with arity 0 can collapse entries
        if let Some(t) = BETuple::try_distinct(n + y.arity - 1, perms) {
            out.add_term(field, t, lattice_sign(field, &path));
        }
    }
    Ok(out)
}

/// Suppresses consecutive repetitions.
fn dedup_consecutive(seq: &[Permutation]) -> Vec<Permutation> {
    let mut out: Vec<Permutation> = Vec::with_capacity(seq.len());
    for s in seq {
        if out.last() != Some(s) {
            out.push(s.clone());
        }
    }
    out
}

/// Partial decomposition `Δ_i^{n,k}: E*(n+k-1) → E*(n) ⊗ E*(k)`.
///
/// For `k ≥ 1` each entry has at most one block decomposition; the path is
/// read off from which factor stays constant between consecutive entries.
/// For `k = 0` (decomposition through a cork) every lift of the entries
/// through the deletion at `i` contributes.
pub fn partial_decompose(field: &PrimeField, w: &BETuple, n: usize, k: usize, i: usize) -> Result<BETensor> {
    if n == 0 || n + k - 1 != w.arity {
        return Err(Error::SizeMismatch { expected: w.arity, got: n + k - 1 });
    }
    if i == 0 || i > n {
        return Err(Error::IndexOutOfRange { index: i, max: n });
    }
    let mut out = Lin::zero();
    if k == 0 {
        let lifts = w
            .perms
            .iter()
            .map(|s| s.deletion_preimages(i))
            .collect::<Result<Vec<_>>>()?;
        for choice in lifts.into_iter().multi_cartesian_product() {
            let x = BETuple { arity: n, perms: choice };
            out.add_term(field, (x, BETuple::identity(0)), 1);
        }
        return Ok(out);
    }
    let mut firsts = Vec::with_capacity(w.perms.len());
    let mut seconds = Vec::with_capacity(w.perms.len());
    for s in &w.perms {
        match s.decompose_block(n, k, i)? {
            Some((t, v)) => {
                firsts.push(t);
                seconds.push(v);
            }
            None => return Ok(out),
        }
    }
    let mut path = Vec::with_capacity(w.degree());
    for j in 0..w.degree() {
        if seconds[j] == seconds[j + 1] {
            path.push(Step::H);
        } else if firsts[j] == firsts[j + 1] {
            path.push(Step::V);
        } else {
            return Ok(out);
        }
    }
    let (Some(x), Some(y)) = (
        BETuple::try_distinct(n, dedup_consecutive(&firsts)),
        BETuple::try_distinct(k, dedup_consecutive(&seconds)),
    ) else {
        return Ok(out);
    };
    out.add_term(field, (x, y), lattice_sign(field, &path));
    Ok(out)
}

/// `ε_s(σ_0,…,σ_k)`: the sign of `(σ_0(1),…,σ_{s-1}(1))` when it is a
/// permutation of `{1,…,s}`, and 0 otherwise.
pub fn epsilon_s(field: &PrimeField, w: &BETuple, s: usize) -> Result<u64> {
    if s == 0 || s > w.perms.len() {
        return Err(Error::IndexOutOfRange { index: s, max: w.perms.len() });
    }
    if w.arity == 0 {
        return Ok(0);
    }
    let firsts: Vec<usize> = w.perms[..s].iter().map(|p| p.apply(1)).collect();
    match Permutation::new(firsts) {
        Ok(p) => Ok(p.sign(field)),
        Err(_) => Ok(0),
    }
}

/// Kronecker pairing of basis tuples.
pub fn pairing(x: &BETuple, y: &BETuple) -> Result<u64> {
    if x.arity != y.arity {
        return Err(Error::SizeMismatch { expected: x.arity, got: y.arity });
    }
    Ok(u64::from(x == y))
}

/// Differential on `E*(n) ⊗ E*(k)` with the pinned Koszul sign.
pub fn tensor_differential(field: &PrimeField, t: &BETensor, range: InsertionRange) -> BETensor {
    t.map_linear(field, |(x, y)| {
        let mut out = Lin::zero();
        for (dx, c) in dual_differential(field, x, range).iter() {
            out.add_term(field, (dx.clone(), y.clone()), c);
        }
        let sign = field.sign(x.degree() as i64);
        for (dy, c) in dual_differential(field, y, range).iter() {
            out.add_term(field, (x.clone(), dy.clone()), field.mul(c, sign));
        }
        out
    })
}

/// `Δ_i(d₂ w) - (d⊗1 ± 1⊗d) Δ_i(w)`; zero when decomposition is a chain map.
pub fn co_leibniz_defect(
    field: &PrimeField,
    w: &BETuple,
    n: usize,
    k: usize,
    i: usize,
    range: InsertionRange,
) -> Result<BETensor> {
    let mut lhs = Lin::zero();
    for (dw, c) in dual_differential(field, w, range).iter() {
        lhs.add_scaled(field, &partial_decompose(field, dw, n, k, i)?, c);
    }
    let rhs = tensor_differential(field, &partial_decompose(field, w, n, k, i)?, range);
    Ok(lhs.sub(field, &rhs))
}
