//! Free truncated algebras on a graded module, and the cobar algebras of
//! the point and the interval.
//!
//! The carrier is spanned by planar decorated trees whose vertex labels have
//! first entry the identity; any other labelling is brought to this form by
//! coinvariance. Truncation keeps tree degree ≤ `W` and leaves plus corks
//! ≤ `A`. Neither is ever lowered by the differential or by grafting, so
//! the truncation is a quotient algebra.
//!
//! The differential is the derivation extending the generator differential
//! with the corolla boundary at every vertex (label insertion plus partial
//! decompositions, grafting a cork for the arity-zero part).

use std::collections::HashMap;

use itertools::Itertools;

use crate::algebra::{
    corolla_boundary, op, op_basis, Algebra, BasisEntry, Element, GradedModule, SignConvention, Violation,
};
use crate::barratt_eccles::{epsilon_s, BETuple};
use crate::error::{Error, Result};
use crate::scalars::PrimeField;
use crate::trees::{Tree, TreeTerm};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Node {
    Generator(usize),
    Cork,
    /// Normalized label and carrier indices of the children.
    Vertex(BETuple, Vec<usize>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FreeParams {
    pub max_degree: usize,
    pub leaf_bound: usize,
    /// Whether corks (and so curvature) are part of the carrier.
    pub curved: bool,
    pub cap: usize,
}

#[derive(Debug, Clone)]
pub struct FreeAlgebra {
    field: PrimeField,
    generators: GradedModule,
    params: FreeParams,
    signs: SignConvention,
    module: GradedModule,
    nodes: Vec<Node>,
    index: HashMap<Node, usize>,
    weights: Vec<usize>,
    leaves: Vec<usize>,
    d: Vec<Element>,
}

impl FreeAlgebra {
    /// The free algebra with the generator differential computed by
    /// `gen_diff` (which may build tree terms with [`op`]).
    pub fn build(
        field: PrimeField,
        generators: GradedModule,
        params: FreeParams,
        signs: SignConvention,
        gen_diff: impl Fn(&FreeAlgebra, usize) -> Element,
    ) -> Result<Self> {
        let mut fa = FreeAlgebra {
            field,
            generators,
            params,
            signs,
            module: GradedModule::default(),
            nodes: vec![],
            index: HashMap::new(),
            weights: vec![],
            leaves: vec![],
            d: vec![],
        };
        fa.enumerate()?;
        let mut d = vec![Element::zero(); fa.nodes.len()];
        for g in 0..fa.generators.dim() {
            d[g] = gen_diff(&fa, g);
        }
        for b in 0..fa.nodes.len() {
            if let Node::Vertex(label, children) = &fa.nodes[b] {
                d[b] = fa.vertex_differential(label, children, &d);
            }
        }
        fa.d = d;
        Ok(fa)
    }

    /// The free algebra on a dg module given by `d` on generators.
    pub fn on_module(
        field: PrimeField,
        generators: GradedModule,
        gen_d: &[Element],
        params: FreeParams,
    ) -> Result<Self> {
        if gen_d.len() != generators.dim() {
            return Err(Error::SizeMismatch { expected: generators.dim(), got: gen_d.len() });
        }
        FreeAlgebra::build(field, generators, params, SignConvention::PINNED, |_, g| gen_d[g].clone())
    }

    fn push(&mut self, node: Node, weight: usize, leaves: usize) -> Result<()> {
        if self.nodes.len() >= self.params.cap {
            return Err(Error::CapExceeded {
                what: "free algebra carrier".into(),
                needed: self.nodes.len() as u128 + 1,
                cap: self.params.cap as u128,
            });
        }
        self.index.insert(node.clone(), self.nodes.len());
        self.nodes.push(node);
        self.weights.push(weight);
        self.leaves.push(leaves);
        Ok(())
    }

    fn enumerate(&mut self) -> Result<()> {
        let p = self.params;
        for g in 0..self.generators.dim() {
            self.push(Node::Generator(g), 0, 1)?;
        }
        if p.curved && p.max_degree >= 1 && p.leaf_bound >= 1 {
            self.push(Node::Cork, 1, 1)?;
        }
        for e in 1..=p.max_degree {
            let by_weight: Vec<Vec<usize>> =
                (0..e).map(|w| (0..self.nodes.len()).filter(|&b| self.weights[b] == w).collect()).collect();
            for m in 2..=p.leaf_bound {
                for r in 0..e {
                    let labels = BETuple::all_normalized(m, r);
                    if labels.is_empty() {
                        continue;
                    }
                    for split in compositions(e - r - 1, m) {
                        let pools: Vec<&Vec<usize>> = split.iter().map(|&w| &by_weight[w]).collect();
                        for children in pools.iter().map(|p| p.iter().copied()).multi_cartesian_product() {
                            let l: usize = children.iter().map(|&c| self.leaves[c]).sum();
                            if l > p.leaf_bound {
                                continue;
                            }
                            for label in &labels {
                                self.push(Node::Vertex(label.clone(), children.clone()), e, l)?;
                            }
                        }
                    }
                }
            }
        }
        let entries = (0..self.nodes.len())
            .map(|b| BasisEntry { name: self.node_name(b), degree: self.node_degree(b) })
            .collect();
        self.module = GradedModule::new(entries)?;
        Ok(())
    }

    fn node_degree(&self, b: usize) -> i64 {
        match &self.nodes[b] {
            Node::Generator(g) => self.generators.degree(*g),
            Node::Cork => -1,
            Node::Vertex(label, children) => {
                children.iter().map(|&c| self.node_degree(c)).sum::<i64>() - label.degree() as i64 - 1
            }
        }
    }

    fn node_name(&self, b: usize) -> String {
        match &self.nodes[b] {
            Node::Generator(g) => self.generators.name(*g).to_string(),
            Node::Cork => "cork".into(),
            Node::Vertex(label, children) => format!(
                "c[{}]({})",
                label.perms().iter().map(|p| format!("{p:?}")).join(","),
                children.iter().map(|&c| self.node_name(c)).join(",")
            ),
        }
    }

    fn vertex_differential(&self, label: &BETuple, children: &[usize], d: &[Element]) -> Element {
        let field = self.field;
        let mut out = corolla_boundary(self, label, children, self.signs);
        let mut prefix = self.signs.symbol_degree(label.degree());
        for (j, &c) in children.iter().enumerate() {
            let mut args: Vec<Element> = children.iter().map(|&b| Element::basis(b)).collect();
            args[j] = d[c].clone();
            out.add_scaled(&field, &op(self, label, &args), field.sign(prefix));
            prefix += self.module.degree(c);
        }
        out
    }

    pub fn params(&self) -> FreeParams {
        self.params
    }

    pub fn generators(&self) -> &GradedModule {
        &self.generators
    }

    pub fn node(&self, b: usize) -> &Node {
        &self.nodes[b]
    }

    pub fn dim(&self) -> usize {
        self.nodes.len()
    }

    pub fn cork(&self) -> Option<usize> {
        self.index.get(&Node::Cork).copied()
    }

    /// The carrier vector as a decorated tree, leaves numbered depth first.
    pub fn tree_term(&self, b: usize) -> TreeTerm {
        let mut decorations = vec![];
        let tree = self.planar_tree(b, &mut decorations);
        TreeTerm { tree, decorations }
    }

    fn planar_tree(&self, b: usize, decorations: &mut Vec<usize>) -> Tree {
        match &self.nodes[b] {
            Node::Generator(g) => {
                decorations.push(*g);
                Tree::leaf(decorations.len())
            }
            Node::Cork => Tree::cork(),
            Node::Vertex(label, children) => Tree::Vertex {
                label: label.clone(),
                children: children.iter().map(|&c| self.planar_tree(c, decorations)).collect(),
            },
        }
    }

    /// Evaluates a carrier element in `target`, sending generator `g` to
    /// `images[g]`: the algebra map out of the free algebra.
    pub fn evaluate<A: Algebra + ?Sized>(&self, target: &A, images: &[Element], x: &Element) -> Element {
        let mut cache: HashMap<usize, Element> = HashMap::new();
        x.map_linear(&target.field(), |&b| self.evaluate_basis(target, images, b, &mut cache))
    }

    fn evaluate_basis<A: Algebra + ?Sized>(
        &self,
        target: &A,
        images: &[Element],
        b: usize,
        cache: &mut HashMap<usize, Element>,
    ) -> Element {
        if let Some(v) = cache.get(&b) {
            return v.clone();
        }
        let v = match &self.nodes[b] {
            Node::Generator(g) => images[*g].clone(),
            Node::Cork => target.curvature(),
            Node::Vertex(label, children) => {
                let args: Vec<Element> =
                    children.iter().map(|&c| self.evaluate_basis(target, images, c, cache)).collect();
                op(target, label, &args)
            }
        };
        cache.insert(b, v.clone());
        v
    }
}

impl Algebra for FreeAlgebra {
    fn field(&self) -> PrimeField {
        self.field
    }

    fn module(&self) -> &GradedModule {
        &self.module
    }

    fn max_degree(&self) -> usize {
        self.params.max_degree
    }

    fn max_arity(&self) -> usize {
        self.params.leaf_bound
    }

    fn differential_basis(&self, b: usize) -> Element {
        self.d[b].clone()
    }

    fn curvature(&self) -> Element {
        self.cork().map(Element::basis).unwrap_or_default()
    }

    fn op_normalized(&self, label: &BETuple, inputs: &[usize]) -> Element {
        self.index
            .get(&Node::Vertex(label.clone(), inputs.to_vec()))
            .map(|&b| Element::basis(b))
            .unwrap_or_default()
    }

    fn op_entries(&self) -> Vec<(BETuple, Vec<usize>, Element)> {
        (0..self.nodes.len())
            .filter_map(|b| match &self.nodes[b] {
                Node::Vertex(l, c) => Some((l.clone(), c.clone(), Element::basis(b))),
                _ => None,
            })
            .collect()
    }

    fn weight(&self, b: usize) -> usize {
        self.weights[b]
    }

    fn leaf_count(&self, b: usize) -> usize {
        self.leaves[b]
    }

    fn leaf_bound(&self) -> Option<usize> {
        Some(self.params.leaf_bound)
    }
}

/// Ordered ways of writing `total` as `parts` nonnegative summands.
fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 0 {
        return if total == 0 { vec![vec![]] } else { vec![] };
    }
    (0..=total)
        .flat_map(|first| {
            compositions(total - first, parts - 1).into_iter().map(move |mut rest| {
                rest.insert(0, first);
                rest
            })
        })
        .collect()
}

/// `d²(b) = ±(l₂^{(12)}(l₀, b) + l₂^{(21)}(l₀, b))` on every carrier vector,
/// with the sign taken from the algebra's convention.
pub fn check_d_squared(fa: &FreeAlgebra) -> Vec<Violation> {
    crate::algebra::check_curvature_with(fa, fa.signs)
}

fn degree_zero(names: &[&str]) -> GradedModule {
    GradedModule::new(names.iter().map(|n| BasisEntry { name: n.to_string(), degree: 0 }).collect())
        .expect("distinct names")
}

/// `−Σ_{n ≠ 1} c_n^{id}(g, …, g)` within the truncation.
fn point_term(fa: &FreeAlgebra, g: usize) -> Element {
    let field = fa.field;
    let mut out = fa.curvature();
    for n in 2..=fa.params.leaf_bound {
        out.add_assign(&field, &op_basis(fa, &BETuple::identity(n), &vec![g; n]));
    }
    out.scaled(&field, field.neg(1))
}

pub fn cobar_point(field: PrimeField, max_degree: usize, leaf_bound: usize, cap: usize) -> Result<FreeAlgebra> {
    cobar_point_with(field, max_degree, leaf_bound, cap, SignConvention::PINNED)
}

pub fn cobar_point_with(
    field: PrimeField,
    max_degree: usize,
    leaf_bound: usize,
    cap: usize,
    signs: SignConvention,
) -> Result<FreeAlgebra> {
    let params = FreeParams { max_degree, leaf_bound, curved: true, cap };
    FreeAlgebra::build(field, degree_zero(&["a0"]), params, signs, point_term)
}

/// Generators `a0, a1` of degree 0 and `a01` of degree 1.
pub fn cobar_interval(field: PrimeField, max_degree: usize, leaf_bound: usize, cap: usize) -> Result<FreeAlgebra> {
    cobar_interval_with(field, max_degree, leaf_bound, cap, SignConvention::PINNED)
}

pub fn cobar_interval_with(
    field: PrimeField,
    max_degree: usize,
    leaf_bound: usize,
    cap: usize,
    signs: SignConvention,
) -> Result<FreeAlgebra> {
    let generators = GradedModule::new(vec![
        BasisEntry { name: "a0".into(), degree: 0 },
        BasisEntry { name: "a1".into(), degree: 0 },
        BasisEntry { name: "a01".into(), degree: 1 },
    ])?;
    let params = FreeParams { max_degree, leaf_bound, curved: true, cap };
    FreeAlgebra::build(field, generators, params, signs, |fa, g| match g {
        0 | 1 => point_term(fa, g),
        _ => {
            let images = [Element::basis(0), Element::basis(1), Element::basis(2)];
            let mut out = images[1].sub(&field, &images[0]);
            out.add_assign(&field, &gauge_sum(fa, &images[2], &images[0], &images[1]));
            out
        }
    })
}

/// `Σ_{n≥2} Σ_{s+a+b=n} Σ_{w ∈ E(n)_{s−1}} ε_s(w) l_n^w(λ^s, α^a, β^b)`.
pub fn gauge_sum<A: Algebra + ?Sized>(alg: &A, lambda: &Element, alpha: &Element, beta: &Element) -> Element {
    let field = alg.field();
    let mut out = Element::zero();
    for n in 2..=alg.max_arity() {
        for s in 1..=n.min(alg.max_degree()) {
            for a in 0..=n - s {
                let b = n - s - a;
                let args: Vec<Element> = std::iter::repeat_n(lambda.clone(), s)
                    .chain(std::iter::repeat_n(alpha.clone(), a))
                    .chain(std::iter::repeat_n(beta.clone(), b))
                    .collect();
                for w in BETuple::all(n, s - 1) {
                    let eps = epsilon_s(&field, &w, s).expect("s within tuple");
                    if eps != 0 {
                        out.add_scaled(&field, &op(alg, &w, &args), eps);
                    }
                }
            }
        }
    }
    out
}
