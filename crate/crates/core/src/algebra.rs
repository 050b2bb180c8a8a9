//! Weight-truncated curved partition L∞-algebras.
//!
//! An algebra is a finite graded module with a predifferential `d`, a
//! curvature `l0` of degree −1, and operations `l_n^w` (n ≥ 2) of degree
//! `−(r+1)` for Barratt–Eccles labels `w` of degree `r`. Operations of
//! tree degree `r + 1 > W` are zero.
//!
//! Only labels with first entry the identity are stored. The others are
//! recovered from coinvariance,
//! `l^{w∘π}(h_1, …, h_n) = ±l^w(h_{π⁻¹(1)}, …, h_{π⁻¹(n)})`,
//! where `±` is the Koszul sign of the reordering.

use std::collections::{BTreeMap, HashMap};

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::barratt_eccles::{dual_differential, partial_decompose, BETuple, InsertionRange};
use crate::error::{Error, Result};
use crate::lin::Lin;
use crate::linalg::Echelon;
use crate::permutations::Permutation;
use crate::scalars::PrimeField;
use crate::trees::{Tree, TreeSeries};

pub type Element = Lin<usize>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasisEntry {
    pub name: String,
    pub degree: i64,
}

#[derive(Debug, Clone, Default)]
pub struct GradedModule {
    entries: Vec<BasisEntry>,
    index: HashMap<String, usize>,
}

impl GradedModule {
    pub fn new(entries: Vec<BasisEntry>) -> Result<Self> {
        let mut index = HashMap::new();
        for (i, e) in entries.iter().enumerate() {
            if index.insert(e.name.clone(), i).is_some() {
                return Err(Error::Schema(format!("duplicate basis name {:?}", e.name)));
            }
        }
        Ok(Self { entries, index })
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[BasisEntry] {
        &self.entries
    }

    pub fn name(&self, b: usize) -> &str {
        &self.entries[b].name
    }

    pub fn degree(&self, b: usize) -> i64 {
        self.entries[b].degree
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.index.get(name).copied().ok_or_else(|| Error::Schema(format!("unknown basis name {name:?}")))
    }

    pub fn of_degree(&self, d: i64) -> Vec<usize> {
        (0..self.dim()).filter(|&b| self.degree(b) == d).collect()
    }

    /// The common degree of the terms of `x`, if `x` is homogeneous.
    pub fn element_degree(&self, x: &Element) -> Option<i64> {
        let degrees: Vec<i64> = x.keys().map(|&b| self.degree(b)).dedup().collect();
        match degrees.as_slice() {
            [d] => Some(*d),
            _ => None,
        }
    }

    pub fn to_named(&self, x: &Element) -> BTreeMap<String, u64> {
        x.iter().map(|(&b, c)| (self.name(b).to_string(), c)).collect()
    }

    pub fn from_named(&self, field: &PrimeField, x: &BTreeMap<String, i64>) -> Result<Element> {
        let mut out = Element::zero();
        for (name, &c) in x {
            out.add_term(field, self.index_of(name)?, field.from_i64(c));
        }
        Ok(out)
    }
}

pub trait Algebra {
    fn field(&self) -> PrimeField;
    fn module(&self) -> &GradedModule;
    /// Truncation degree `W`.
    fn max_degree(&self) -> usize;
    /// Largest arity of a possibly nonzero operation.
    fn max_arity(&self) -> usize;
    fn differential_basis(&self, b: usize) -> Element;
    fn curvature(&self) -> Element;
    /// `l_n^w` on basis inputs, for a normalized label of arity ≥ 2 and
    /// tree degree ≤ `W`.
    fn op_normalized(&self, label: &BETuple, inputs: &[usize]) -> Element;

    /// Tree degree of a basis vector when the algebra is graded by it.
    fn weight(&self, _b: usize) -> usize {
        0
    }

    /// Leaves plus corks of a basis vector, when graded by it.
    fn leaf_count(&self, _b: usize) -> usize {
        0
    }

    /// Operations whose inputs have more leaves plus corks than this vanish.
    fn leaf_bound(&self) -> Option<usize> {
        None
    }

    /// Every stored nonzero `(label, inputs, value)` with normalized label.
    fn op_entries(&self) -> Vec<(BETuple, Vec<usize>, Element)>;

    /// Presentation-specific checks run by [`validate`].
    fn structural_violations(&self) -> Vec<Violation> {
        vec![]
    }

    /// Largest arity at which the relations can have nonzero terms.
    fn relation_arity_bound(&self) -> usize {
        let a = self.max_arity();
        match self.leaf_bound() {
            Some(l) => l.min(2 * a.max(1) - 1),
            None => 2 * a.max(1) - 1,
        }
    }
}

/// `(−1)^{Σ |h_a||h_b|}` over the pairs `a < b` with `π(a) > π(b)`:
/// the Koszul sign of moving `h_a` to position `π(a)`.
pub fn koszul_reorder_sign(field: &PrimeField, degrees: &[i64], pi: &Permutation) -> u64 {
    let mut e = 0i64;
    for a in 0..degrees.len() {
        for b in a + 1..degrees.len() {
            if pi.apply(a + 1) > pi.apply(b + 1) {
                e += degrees[a] * degrees[b];
            }
        }
    }
    field.sign(e)
}

pub fn differential<A: Algebra + ?Sized>(alg: &A, x: &Element) -> Element {
    x.map_linear(&alg.field(), |&b| alg.differential_basis(b))
}

/// `l_n^w` on basis inputs for any label; arity 0 is the curvature.
pub fn op_basis<A: Algebra + ?Sized>(alg: &A, label: &BETuple, inputs: &[usize]) -> Element {
    let field = alg.field();
    let n = label.arity();
    if n == 1 || label.degree() + 1 > alg.max_degree() || n > alg.max_arity() && n != 0 {
        return Element::zero();
    }
    if n == 0 {
        return alg.curvature();
    }
    if let Some(bound) = alg.leaf_bound() {
        if inputs.iter().map(|&b| alg.leaf_count(b)).sum::<usize>() > bound {
            return Element::zero();
        }
    }
    let weight: usize = inputs.iter().map(|&b| alg.weight(b)).sum();
    if weight + label.degree() + 1 > alg.max_degree() {
        return Element::zero();
    }
    if label.is_normalized() {
        return alg.op_normalized(label, inputs);
    }
    let (rep, pi) = label.normalize();
    let degrees: Vec<i64> = inputs.iter().map(|&b| alg.module().degree(b)).collect();
    let pi_inv = pi.inverse();
    let permuted: Vec<usize> = (1..=n).map(|i| inputs[pi_inv.apply(i) - 1]).collect();
    // h_a moves to position π(a)
    let sign = koszul_reorder_sign(&field, &degrees, &pi);
    alg.op_normalized(&rep, &permuted).scaled(&field, sign)
}

/// Multilinear extension of [`op_basis`].
pub fn op<A: Algebra + ?Sized>(alg: &A, label: &BETuple, inputs: &[Element]) -> Element {
    let field = alg.field();
    let mut out = Element::zero();
    if label.arity() == 0 {
        return op_basis(alg, label, &[]);
    }
    for combo in inputs.iter().map(|x| x.iter().collect::<Vec<_>>()).multi_cartesian_product() {
        let basis: Vec<usize> = combo.iter().map(|(&b, _)| b).collect();
        let c = combo.iter().fold(1, |acc, (_, c)| field.mul(acc, *c));
        out.add_scaled(&field, &op_basis(alg, label, &basis), c);
    }
    out
}

/// Evaluates `t` with `inputs[j-1]` on leaf `j`, corks going to `l0`.
/// Inputs are first reordered to the depth-first leaf order, with the
/// Koszul sign of that reordering.
pub fn eval_tree<A: Algebra + ?Sized>(alg: &A, t: &Tree, inputs: &[Element]) -> Result<Element> {
    t.validate()?;
    if inputs.len() != t.arity() {
        return Err(Error::SizeMismatch { expected: t.arity(), got: inputs.len() });
    }
    if t.degree() > alg.max_degree() {
        return Ok(Element::zero());
    }
    if inputs.is_empty() {
        return Ok(eval_planar(alg, t, &[]));
    }
    let field = alg.field();
    let order = t.leaf_labels();
    let mut out = Element::zero();
    for combo in inputs.iter().map(|x| x.iter().collect::<Vec<_>>()).multi_cartesian_product() {
        let basis: Vec<usize> = combo.iter().map(|(&b, _)| b).collect();
        let c = combo.iter().fold(1, |acc, (_, c)| field.mul(acc, *c));
        // input j sits at depth-first position pos[j]
        let degrees: Vec<i64> = basis.iter().map(|&b| alg.module().degree(b)).collect();
        let mut pos = vec![0; order.len()];
        for (p, &leaf) in order.iter().enumerate() {
            pos[leaf - 1] = p + 1;
        }
        let sign = if pos.is_empty() {
            1
        } else {
            koszul_reorder_sign(&field, &degrees, &Permutation::new(pos).expect("leaf bijection"))
        };
        let v = eval_planar(alg, t, &basis);
        out.add_scaled(&field, &v, field.mul(c, sign));
    }
    Ok(out)
}

fn eval_planar<A: Algebra + ?Sized>(alg: &A, t: &Tree, basis: &[usize]) -> Element {
    match t {
        Tree::Leaf { leaf } => Element::basis(basis[leaf - 1]),
        Tree::Cork { .. } => alg.curvature(),
        Tree::Vertex { label, children } => {
            let values: Vec<Element> = children.iter().map(|c| eval_planar(alg, c, basis)).collect();
            op(alg, label, &values)
        }
    }
}

/// `Σ c · γ(τ(g_{i_1}, …, g_{i_n}))` over the stored terms.
pub fn eval_series<A: Algebra + ?Sized>(alg: &A, s: &TreeSeries) -> Result<Element> {
    let field = alg.field();
    let mut out = Element::zero();
    for (term, c) in s.terms.iter() {
        if term.tree.degree() > s.max_degree {
            return Err(Error::Degree(format!("term above truncation {}", s.max_degree)));
        }
        let inputs: Vec<Element> = term.decorations.iter().map(|&b| Element::basis(b)).collect();
        out.add_scaled(&field, &eval_tree(alg, &term.tree, &inputs)?, c);
    }
    Ok(out)
}

/// The `n!` pairs `(c_n^{σ.w}, g_{σ⁻¹(1)} ⊗ … ⊗ g_{σ⁻¹(n)})` with Koszul
/// signs, `σ.w = (σσ_0, …, σσ_r)`.
pub fn norm_map_corolla(
    field: &PrimeField,
    w: &BETuple,
    inputs: &[usize],
    degree: impl Fn(usize) -> i64,
) -> Vec<(BETuple, Vec<usize>, u64)> {
    let degrees: Vec<i64> = inputs.iter().map(|&b| degree(b)).collect();
    Permutation::all(w.arity())
        .into_iter()
        .map(|sigma| {
            let inv = sigma.inverse();
            let word = (1..=w.arity()).map(|i| inputs[inv.apply(i) - 1]).collect();
            (w.left_act(&sigma), word, koszul_reorder_sign(field, &degrees, &sigma))
        })
        .collect()
}

/// Global signs of the two parts of the corolla boundary. The decomposition
/// term for `x ∘_i y` carries
/// `(−1)^{c + a·r_x + b·r_y} · (−1)^{|y|(|h_1|+…+|h_{i−1}|)}`, and the
/// insertion term `(−1)^e` on top of the `(−1)^{spot}` of `d₂`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SignConvention {
    pub insertion: bool,
    pub decomposition: bool,
    pub outer_degree: bool,
    pub inner_degree: bool,
    /// Extra sign on the arity-zero (cork) decomposition terms.
    pub cork: bool,
    /// Whether `d` picks up `(−1)^{|l^w|}` when passing an operation symbol.
    pub symbol_koszul: bool,
    /// Whether `d²` equals `−(l₂^{(12)}(l₀,−) + l₂^{(21)}(l₀,−))` rather than `+`.
    pub bracket: bool,
}

impl SignConvention {
    pub const PINNED: SignConvention = SignConvention {
        insertion: false,
        decomposition: true,
        outer_degree: true,
        inner_degree: false,
        cork: false,
        symbol_koszul: true,
        bracket: true,
    };

    pub fn all() -> Vec<SignConvention> {
        (0..128u8)
            .map(|m| SignConvention {
                insertion: m & 1 != 0,
                decomposition: m & 2 != 0,
                outer_degree: m & 4 != 0,
                inner_degree: m & 8 != 0,
                cork: m & 16 != 0,
                symbol_koszul: m & 32 != 0,
                bracket: m & 64 != 0,
            })
            .collect()
    }

    /// Starting exponent of the derivation sign for a label of degree `r`.
    pub fn symbol_degree(&self, r: usize) -> i64 {
        if self.symbol_koszul {
            -(r as i64 + 1)
        } else {
            0
        }
    }

    fn decomposition_sign(&self, field: &PrimeField, rx: usize, ry: usize) -> u64 {
        let e = i64::from(self.decomposition)
            + i64::from(self.outer_degree) * rx as i64
            + i64::from(self.inner_degree) * ry as i64;
        field.sign(e)
    }
}

impl Default for SignConvention {
    fn default() -> Self {
        Self::PINNED
    }
}

/// One `l_p ∘_i l_q` family in the boundary of a corolla.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CompositeKey {
    pub p: usize,
    pub q: usize,
    pub i: usize,
}

/// The right-hand side of the relation for `∂(l_n^w)` on basis inputs
/// `h`, split into the insertion part and one entry per `(p, q, i)`.
pub fn corolla_boundary_parts<A: Algebra + ?Sized>(
    alg: &A,
    w: &BETuple,
    h: &[usize],
    signs: SignConvention,
) -> (Element, BTreeMap<CompositeKey, Element>) {
    let field = alg.field();
    let n = w.arity();
    let mut insertion = Element::zero();
    if w.degree() + 2 <= alg.max_degree() {
        for (w2, c) in dual_differential(&field, w, InsertionRange::Full).iter() {
            insertion.add_scaled(&field, &op_basis(alg, w2, h), c);
        }
        if signs.insertion {
            insertion = insertion.scaled(&field, field.neg(1));
        }
    }
    let mut composites = BTreeMap::new();
    if w.degree() + 2 > alg.max_degree() {
        return (insertion, composites);
    }
    let curvature = alg.curvature();
    let degrees: Vec<i64> = h.iter().map(|&b| alg.module().degree(b)).collect();
    let ks = std::iter::once(0).chain(2..n);
    for k in ks {
        if k == 0 && curvature.is_zero() {
            continue;
        }
        let nx = n + 1 - k;
        if nx < 2 {
            continue;
        }
        let slots = if k == 0 { nx..=nx } else { 1..=nx };
        for i in slots {
            let terms = partial_decompose(&field, w, nx, k, i).expect("valid decomposition shape");
            let mut acc = Element::zero();
            let before: i64 = degrees[..i - 1].iter().sum();
            for ((x, y), c) in terms.iter() {
                let inner = if k == 0 { curvature.clone() } else { op_basis(alg, y, &h[i - 1..i - 1 + k]) };
                if inner.is_zero() {
                    continue;
                }
                let y_degree = -(y.degree() as i64 + 1);
                let mut sign = field.mul(
                    signs.decomposition_sign(&field, x.degree(), y.degree()),
                    field.sign(y_degree * before),
                );
                if k == 0 && signs.cork {
                    sign = field.neg(sign);
                }
                let mut args: Vec<Element> = h[..i - 1].iter().map(|&b| Element::basis(b)).collect();
                args.push(inner);
                args.extend(h[i - 1 + k..].iter().map(|&b| Element::basis(b)));
                acc.add_scaled(&field, &op(alg, x, &args), field.mul(c, sign));
            }
            if !acc.is_zero() {
                composites.insert(CompositeKey { p: nx, q: k, i }, acc);
            }
        }
    }
    (insertion, composites)
}

pub fn corolla_boundary<A: Algebra + ?Sized>(alg: &A, w: &BETuple, h: &[usize], signs: SignConvention) -> Element {
    let field = alg.field();
    let (mut out, composites) = corolla_boundary_parts(alg, w, h, signs);
    for v in composites.values() {
        out.add_assign(&field, v);
    }
    out
}

/// `d(l^w(h)) − Σ_j (−1)^{|l^w| + |h_1| + … + |h_{j−1}|} l^w(…, d h_j, …)`.
pub fn corolla_commutator<A: Algebra + ?Sized>(alg: &A, w: &BETuple, h: &[usize], signs: SignConvention) -> Element {
    let field = alg.field();
    let mut out = differential(alg, &op_basis(alg, w, h));
    let mut prefix = signs.symbol_degree(w.degree());
    for j in 0..h.len() {
        let mut args: Vec<Element> = h.iter().map(|&b| Element::basis(b)).collect();
        args[j] = alg.differential_basis(h[j]);
        out.add_scaled(&field, &op(alg, w, &args), field.neg(field.sign(prefix)));
        prefix += alg.module().degree(h[j]);
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    /// `degree`, `curvature`, `bianchi` or `relation`.
    pub identity: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label: Option<BETuple>,
    pub inputs: Vec<String>,
    /// `lhs − rhs`, by basis name.
    pub defect: BTreeMap<String, u64>,
    /// Composite families contributing on the defect's support.
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub composites: Vec<CompositeKey>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub pass: bool,
    pub violations: Vec<Violation>,
}

/// `d²(g) = l₂^{(12)}(l₀, g) + l₂^{(21)}(l₀, g)` on every basis vector.
pub fn check_curvature<A: Algebra + ?Sized>(alg: &A) -> Vec<Violation> {
    check_curvature_with(alg, SignConvention::PINNED)
}

pub fn check_curvature_with<A: Algebra + ?Sized>(alg: &A, signs: SignConvention) -> Vec<Violation> {
    let field = alg.field();
    let module = alg.module();
    let l0 = alg.curvature();
    let id2 = BETuple::identity(2);
    let swap = BETuple::from_images(2, &[&[2, 1]]).expect("valid");
    let mut out = vec![];
    for g in 0..module.dim() {
        let lhs = differential(alg, &alg.differential_basis(g));
        let gx = Element::basis(g);
        let mut rhs = op(alg, &id2, &[l0.clone(), gx.clone()]);
        rhs.add_assign(&field, &op(alg, &swap, &[l0.clone(), gx]));
        if signs.bracket {
            rhs = rhs.scaled(&field, field.neg(1));
        }
        let defect = lhs.sub(&field, &rhs);
        if !defect.is_zero() {
            out.push(Violation {
                identity: "curvature".into(),
                label: None,
                inputs: vec![module.name(g).to_string()],
                defect: module.to_named(&defect),
                composites: vec![],
            });
        }
    }
    out
}

/// Every basis tuple of length `n` passing the weight and leaf pruning for
/// a label of degree `r`.
fn input_tuples<A: Algebra + ?Sized>(alg: &A, n: usize, r: usize) -> Vec<Vec<usize>> {
    let budget = alg.max_degree().saturating_sub(r + 1);
    let candidates: Vec<usize> = (0..alg.module().dim()).filter(|&b| alg.weight(b) <= budget).collect();
    let mut out: Vec<Vec<usize>> = vec![vec![]];
    for _ in 0..n {
        let mut next = vec![];
        for t in &out {
            let w: usize = t.iter().map(|&b| alg.weight(b)).sum();
            let l: usize = t.iter().map(|&b| alg.leaf_count(b)).sum();
            for &b in &candidates {
                if w + alg.weight(b) > budget {
                    continue;
                }
                if let Some(bound) = alg.leaf_bound() {
                    if l + alg.leaf_count(b) > bound {
                        continue;
                    }
                }
                let mut u = t.clone();
                u.push(b);
                next.push(u);
            }
        }
        out = next;
    }
    out
}

fn relation_violation<A: Algebra + ?Sized>(alg: &A, w: &BETuple, h: &[usize], signs: SignConvention) -> Option<Violation> {
    let field = alg.field();
    let module = alg.module();
    let lhs = corolla_commutator(alg, w, h, signs);
    let (insertion, composites) = corolla_boundary_parts(alg, w, h, signs);
    let mut rhs = insertion;
    for v in composites.values() {
        rhs.add_assign(&field, v);
    }
    let defect = lhs.sub(&field, &rhs);
    if defect.is_zero() {
        return None;
    }
    let touched = composites
        .iter()
        .filter(|(_, v)| v.keys().any(|k| defect.coeff(k) != 0))
        .map(|(k, _)| *k)
        .collect();
    Some(Violation {
        identity: "relation".into(),
        label: Some(w.clone()),
        inputs: h.iter().map(|&b| module.name(b).to_string()).collect(),
        defect: module.to_named(&defect),
        composites: touched,
    })
}

/// The relations for every normalized label of tree degree ≤ `W`, every
/// arity up to the relation bound and every (pruned) basis tuple, plus
/// `d(l₀) = 0`.
pub fn check_relations<A: Algebra + ?Sized>(alg: &A) -> Vec<Violation> {
    check_relations_with(alg, SignConvention::PINNED, false)
}

/// As [`check_relations`]; `all_labels` also runs every non-normalized
/// label, which exercises the coinvariance signs.
pub fn check_relations_with<A: Algebra + ?Sized>(alg: &A, signs: SignConvention, all_labels: bool) -> Vec<Violation> {
    let module = alg.module();
    let mut out = vec![];
    let dl0 = differential(alg, &alg.curvature());
    if !dl0.is_zero() {
        out.push(Violation {
            identity: "bianchi".into(),
            label: None,
            inputs: vec![],
            defect: module.to_named(&dl0),
            composites: vec![],
        });
    }
    for n in 2..=alg.relation_arity_bound() {
        for r in 0..alg.max_degree() {
            let labels = if all_labels { BETuple::all(n, r) } else { BETuple::all_normalized(n, r) };
            if labels.is_empty() {
                continue;
            }
            for h in input_tuples(alg, n, r) {
                for w in &labels {
                    if let Some(v) = relation_violation(alg, w, &h, signs) {
                        out.push(v);
                    }
                }
            }
        }
    }
    out
}

/// Degree bookkeeping: `d` and `l0` of degree −1, `l_n^w` of degree `−(r+1)`.
pub fn check_degrees<A: Algebra + ?Sized>(alg: &A) -> Vec<Violation> {
    let module = alg.module();
    let mut out = vec![];
    let mut bad = |what: &str, inputs: Vec<String>, x: &Element| {
        out.push(Violation {
            identity: "degree".into(),
            label: None,
            inputs: std::iter::once(what.to_string()).chain(inputs).collect(),
            defect: module.to_named(x),
            composites: vec![],
        })
    };
    for g in 0..module.dim() {
        let dg = alg.differential_basis(g);
        if dg.keys().any(|&b| module.degree(b) != module.degree(g) - 1) {
            bad("d", vec![module.name(g).to_string()], &dg);
        }
    }
    let l0 = alg.curvature();
    if l0.keys().any(|&b| module.degree(b) != -1) {
        bad("l0", vec![], &l0);
    }
    out
}

pub fn validate<A: Algebra + ?Sized>(alg: &A) -> ValidationReport {
    let mut violations = alg.structural_violations();
    violations.extend(check_degrees(alg));
    violations.extend(check_curvature(alg));
    violations.extend(check_relations(alg));
    ValidationReport { pass: violations.is_empty(), violations }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiltrationLevel {
    pub delta: usize,
    pub dim: usize,
    /// `dim gr_δ` per homological degree.
    pub graded: BTreeMap<i64, usize>,
    pub spanning: Vec<BTreeMap<String, u64>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiltrationReport {
    pub levels: Vec<FiltrationLevel>,
}

/// `W_δ = span γ(decorated trees of degree ≥ δ)` for `δ = 0..=W+1`.
///
/// The images of decorated trees of exact degree `e` are built degree by
/// degree: a cork for `e = 1`, and `l^w(v_1, …, v_m)` with `v_j` spanning
/// the images of degree `e_j` and `r + 1 + Σ e_j = e`.
pub fn qp_filtration<A: Algebra + ?Sized>(alg: &A, cap: usize) -> Result<FiltrationReport> {
    let field = alg.field();
    let module = alg.module();
    let top = alg.max_degree();
    let mut exact: Vec<Vec<Element>> = vec![(0..module.dim()).map(Element::basis).collect()];
    let mut evaluations = 0usize;
    for e in 1..=top {
        let mut span = Echelon::new(field);
        let mut gens = vec![];
        let push = |v: Element, span: &mut Echelon, gens: &mut Vec<Element>| {
            for part in homogeneous_parts(module, &v) {
                if span.insert(&part) {
                    gens.push(part);
                }
            }
        };
        if e == 1 {
            push(alg.curvature(), &mut span, &mut gens);
        }
        for m in 2..=alg.max_arity() {
            for r in 0..e {
                let rest = e - r - 1;
                for degrees in compositions(rest, m) {
                    let pools: Vec<&Vec<Element>> = degrees.iter().map(|&d| &exact[d]).collect();
                    if pools.iter().any(|p| p.is_empty()) {
                        continue;
                    }
                    for w in BETuple::all_normalized(m, r) {
                        for combo in pools.iter().map(|p| p.iter()).multi_cartesian_product() {
                            evaluations += 1;
                            if evaluations > cap {
                                return Err(Error::CapExceeded {
                                    what: "filtration evaluations".into(),
                                    needed: evaluations as u128,
                                    cap: cap as u128,
                                });
                            }
                            let args: Vec<Element> = combo.into_iter().cloned().collect();
                            push(op(alg, &w, &args), &mut span, &mut gens);
                        }
                    }
                }
            }
        }
        exact.push(gens);
    }
    let mut levels = vec![];
    let mut ranks: Vec<BTreeMap<i64, usize>> = vec![];
    for delta in 0..=top + 1 {
        let mut by_degree: BTreeMap<i64, Echelon> = BTreeMap::new();
        let mut spanning = vec![];
        for v in exact.iter().skip(delta).flatten() {
            let d = module.element_degree(v).expect("homogeneous");
            if by_degree.entry(d).or_insert_with(|| Echelon::new(field)).insert(v) {
                spanning.push(module.to_named(v));
            }
        }
        ranks.push(by_degree.iter().map(|(&d, e)| (d, e.rank())).collect());
        levels.push(FiltrationLevel { delta, dim: spanning.len(), graded: BTreeMap::new(), spanning });
    }
    for delta in 0..=top + 1 {
        let next = ranks.get(delta + 1).cloned().unwrap_or_default();
        levels[delta].graded = ranks[delta]
            .iter()
            .map(|(&d, &r)| (d, r - next.get(&d).copied().unwrap_or(0)))
            .filter(|&(_, r)| r > 0)
            .collect();
    }
    Ok(FiltrationReport { levels })
}

fn homogeneous_parts(module: &GradedModule, v: &Element) -> Vec<Element> {
    let mut parts: BTreeMap<i64, Element> = BTreeMap::new();
    for (&b, c) in v.iter() {
        parts.entry(module.degree(b)).or_default().add_term_unchecked(b, c);
    }
    parts.into_values().collect()
}

/// Ordered ways of writing `total` as `parts` nonnegative summands.
fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 0 {
        return if total == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = vec![];
    for first in 0..=total {
        for mut rest in compositions(total - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

pub const ALGEBRA_SCHEMA: &str = "plinf.algebra/1";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileBasisEntry {
    pub name: String,
    pub degree: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub leaves: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DifferentialEntry {
    pub from: String,
    pub to: String,
    pub coeff: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableEntry {
    pub inputs: Vec<String>,
    pub out: BTreeMap<String, i64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OpEntry {
    pub arity: usize,
    pub label: BETuple,
    pub table: Vec<TableEntry>,
}

/// The on-disk presentation of a truncated algebra.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlgebraFile {
    pub schema: String,
    pub p: u64,
    #[serde(rename = "W")]
    pub w: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub leaf_bound: Option<usize>,
    pub basis: Vec<FileBasisEntry>,
    #[serde(default)]
    pub d: Vec<DifferentialEntry>,
    #[serde(default)]
    pub l0: BTreeMap<String, i64>,
    #[serde(default)]
    pub ops: Vec<OpEntry>,
}

type OpTable = BTreeMap<BETuple, BTreeMap<Vec<usize>, Element>>;

/// An algebra given by explicit operation tables.
#[derive(Debug, Clone)]
pub struct TableAlgebra {
    field: PrimeField,
    module: GradedModule,
    w: usize,
    d: Vec<Element>,
    l0: Element,
    ops: OpTable,
    max_arity: usize,
    grading: Option<(Vec<usize>, Vec<usize>, Option<usize>)>,
}

impl TableAlgebra {
    /// The abelian algebra on a chain complex: no operations, no curvature.
    pub fn abelian(field: PrimeField, module: GradedModule, d: Vec<Element>, w: usize) -> Result<Self> {
        if d.len() != module.dim() {
            return Err(Error::SizeMismatch { expected: module.dim(), got: d.len() });
        }
        Ok(Self { field, module, w, d, l0: Element::zero(), ops: BTreeMap::new(), max_arity: 0, grading: None })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: AlgebraFile = serde_json::from_str(text)?;
        Self::from_file(&file)
    }

    pub fn from_file(file: &AlgebraFile) -> Result<Self> {
        if !file.schema.starts_with("plinf.algebra/") {
            return Err(Error::Schema(format!("unsupported schema {:?}", file.schema)));
        }
        let field = PrimeField::new(file.p)?;
        let module = GradedModule::new(
            file.basis.iter().map(|b| BasisEntry { name: b.name.clone(), degree: b.degree }).collect(),
        )?;
        let mut d = vec![Element::zero(); module.dim()];
        for e in &file.d {
            d[module.index_of(&e.from)?].add_term(&field, module.index_of(&e.to)?, field.from_i64(e.coeff));
        }
        let l0 = module.from_named(&field, &file.l0)?;
        let mut ops: OpTable = BTreeMap::new();
        let mut max_arity = 0;
        for entry in &file.ops {
            let n = entry.label.arity();
            if n != entry.arity || n < 2 {
                return Err(Error::Schema(format!("operation arity {} with label of arity {n}", entry.arity)));
            }
            if entry.label.degree() + 1 > file.w {
                return Err(Error::Schema(format!(
                    "operation of tree degree {} above W = {}",
                    entry.label.degree() + 1,
                    file.w
                )));
            }
            max_arity = max_arity.max(n);
            let (rep, pi) = entry.label.normalize();
            let pi_inv = pi.inverse();
            for t in &entry.table {
                if t.inputs.len() != n {
                    return Err(Error::SizeMismatch { expected: n, got: t.inputs.len() });
                }
                let inputs: Vec<usize> = t.inputs.iter().map(|x| module.index_of(x)).collect::<Result<_>>()?;
                let degrees: Vec<i64> = inputs.iter().map(|&b| module.degree(b)).collect();
                let permuted: Vec<usize> = (1..=n).map(|i| inputs[pi_inv.apply(i) - 1]).collect();
                let sign = koszul_reorder_sign(&field, &degrees, &pi);
                let out = module.from_named(&field, &t.out)?.scaled(&field, sign);
                let slot = ops.entry(rep.clone()).or_default();
                match slot.get(&permuted) {
                    Some(prev) if prev != &out => {
                        return Err(Error::Schema(format!(
                            "conflicting entries for label {:?} on {:?}",
                            entry.label, t.inputs
                        )))
                    }
                    _ => {
                        if !out.is_zero() {
                            slot.insert(permuted, out);
                        }
                    }
                }
            }
        }
        let grading = if file.basis.iter().all(|b| b.weight.is_some() && b.leaves.is_some()) && !file.basis.is_empty()
        {
            Some((
                file.basis.iter().map(|b| b.weight.unwrap_or(0)).collect(),
                file.basis.iter().map(|b| b.leaves.unwrap_or(0)).collect(),
                file.leaf_bound,
            ))
        } else {
            None
        };
        Ok(Self { field, module, w: file.w, d, l0, ops, max_arity, grading })
    }

    /// Exports any algebra in the file format.
    pub fn export<A: Algebra + ?Sized>(alg: &A) -> AlgebraFile {
        let field = alg.field();
        let module = alg.module();
        let signed = |x: &Element| -> BTreeMap<String, i64> {
            x.iter().map(|(&b, c)| (module.name(b).to_string(), signed_repr(&field, c))).collect()
        };
        let graded = alg.leaf_bound().is_some();
        let basis = (0..module.dim())
            .map(|b| FileBasisEntry {
                name: module.name(b).to_string(),
                degree: module.degree(b),
                weight: graded.then(|| alg.weight(b)),
                leaves: graded.then(|| alg.leaf_count(b)),
            })
            .collect();
        let mut d = vec![];
        for b in 0..module.dim() {
            for (&t, c) in alg.differential_basis(b).iter() {
                d.push(DifferentialEntry {
                    from: module.name(b).to_string(),
                    to: module.name(t).to_string(),
                    coeff: signed_repr(&field, c),
                });
            }
        }
        let mut grouped: BTreeMap<BETuple, Vec<TableEntry>> = BTreeMap::new();
        for (label, inputs, value) in alg.op_entries() {
            grouped.entry(label).or_default().push(TableEntry {
                inputs: inputs.iter().map(|&b| module.name(b).to_string()).collect(),
                out: signed(&value),
            });
        }
        AlgebraFile {
            schema: ALGEBRA_SCHEMA.into(),
            p: field.modulus(),
            w: alg.max_degree(),
            leaf_bound: alg.leaf_bound(),
            basis,
            d,
            l0: signed(&alg.curvature()),
            ops: grouped
                .into_iter()
                .map(|(label, table)| OpEntry { arity: label.arity(), label, table })
                .collect(),
        }
    }
}

/// Coefficients print as the representative in `(−p/2, p/2]`.
pub(crate) fn signed_repr(field: &PrimeField, c: u64) -> i64 {
    let p = field.modulus();
    if c > p / 2 {
        c as i64 - p as i64
    } else {
        c as i64
    }
}

impl Algebra for TableAlgebra {
    fn field(&self) -> PrimeField {
        self.field
    }

    fn module(&self) -> &GradedModule {
        &self.module
    }

    fn max_degree(&self) -> usize {
        self.w
    }

    fn max_arity(&self) -> usize {
        self.max_arity
    }

    fn differential_basis(&self, b: usize) -> Element {
        self.d[b].clone()
    }

    fn curvature(&self) -> Element {
        if self.w == 0 {
            Element::zero()
        } else {
            self.l0.clone()
        }
    }

    fn op_normalized(&self, label: &BETuple, inputs: &[usize]) -> Element {
        self.ops.get(label).and_then(|t| t.get(inputs)).cloned().unwrap_or_default()
    }

    fn op_entries(&self) -> Vec<(BETuple, Vec<usize>, Element)> {
        self.ops
            .iter()
            .flat_map(|(l, t)| t.iter().map(move |(h, v)| (l.clone(), h.clone(), v.clone())))
            .collect()
    }

    fn weight(&self, b: usize) -> usize {
        self.grading.as_ref().map_or(0, |g| g.0[b])
    }

    fn leaf_count(&self, b: usize) -> usize {
        self.grading.as_ref().map_or(0, |g| g.1[b])
    }

    fn leaf_bound(&self) -> Option<usize> {
        self.grading.as_ref().and_then(|g| g.2)
    }

    fn structural_violations(&self) -> Vec<Violation> {
        let module = &self.module;
        let mut out = vec![];
        for (label, inputs, value) in self.op_entries() {
            let expected: i64 = inputs.iter().map(|&b| module.degree(b)).sum::<i64>() - label.degree() as i64 - 1;
            let weight: usize = inputs.iter().map(|&b| self.weight(b)).sum::<usize>() + label.degree() + 1;
            let wrong_degree = value.keys().any(|&b| module.degree(b) != expected);
            let wrong_weight = self.grading.is_some() && value.keys().any(|&b| self.weight(b) < weight);
            if wrong_degree || wrong_weight {
                out.push(Violation {
                    identity: "degree".into(),
                    label: Some(label),
                    inputs: inputs.iter().map(|&b| module.name(b).to_string()).collect(),
                    defect: module.to_named(&value),
                    composites: vec![],
                });
            }
        }
        out
    }
}
