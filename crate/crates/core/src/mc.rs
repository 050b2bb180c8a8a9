//! Maurer–Cartan elements, gauge equivalences and π₀ of truncated algebras.

use std::collections::{BTreeMap, BTreeSet};

use petgraph::unionfind::UnionFind;
use serde::{Deserialize, Serialize};

use crate::algebra::{differential, op, Algebra, Element};
use crate::barratt_eccles::BETuple;
use crate::error::{Error, Result};
use crate::free_cobar::{gauge_sum, FreeAlgebra};
use crate::simplicial::span_coefficients;

pub const DEFAULT_CAP: usize = 1 << 20;

fn require_degree<A: Algebra + ?Sized>(alg: &A, x: &Element, degree: i64, what: &str) -> Result<()> {
    match alg.module().element_degree(x) {
        Some(d) if d != degree => Err(Error::Degree(format!("{what} has degree {d}, expected {degree}"))),
        None if !x.is_zero() => Err(Error::Degree(format!("{what} is not homogeneous"))),
        _ => Ok(()),
    }
}

/// `l₀ + dα + Σ_{n≥2} l_n^{id}(α, …, α)`.
pub fn mc_curvature<A: Algebra + ?Sized>(alg: &A, alpha: &Element) -> Element {
    let field = alg.field();
    let mut out = alg.curvature();
    out.add_assign(&field, &differential(alg, alpha));
    for n in 2..=alg.max_arity() {
        out.add_assign(&field, &op(alg, &BETuple::identity(n), &vec![alpha.clone(); n]));
    }
    out
}

pub fn is_mc<A: Algebra + ?Sized>(alg: &A, alpha: &Element) -> Result<bool> {
    require_degree(alg, alpha, 0, "alpha")?;
    Ok(mc_curvature(alg, alpha).is_zero())
}

/// Every element of `span(basis)`, in lexicographic coefficient order.
fn span<A: Algebra + ?Sized>(alg: &A, degree: i64, cap: usize) -> Result<Vec<Element>> {
    let field = alg.field();
    let basis = alg.module().of_degree(degree);
    let count = (field.modulus() as u128).checked_pow(basis.len() as u32).unwrap_or(u128::MAX);
    if count > cap as u128 {
        return Err(Error::CapExceeded {
            what: format!("degree-{degree} elements (try a smaller example or a larger --cap)"),
            needed: count,
            cap: cap as u128,
        });
    }
    Ok(span_coefficients(field, basis.len())
        .map(|cs| Element::from_terms(&field, basis.iter().copied().zip(cs)))
        .collect())
}

pub fn enumerate_mc<A: Algebra + ?Sized>(alg: &A, cap: usize) -> Result<Vec<Element>> {
    Ok(span(alg, 0, cap)?.into_iter().filter(|a| mc_curvature(alg, a).is_zero()).collect())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GaugeWitness {
    pub alpha: Element,
    pub beta: Element,
    pub lambda: Element,
}

/// `dλ − (β − α + Σ ε_s(w) l_n^w(λ^s, α^a, β^b))`.
pub fn gauge_defect<A: Algebra + ?Sized>(alg: &A, w: &GaugeWitness) -> Element {
    let field = alg.field();
    let mut rhs = w.beta.sub(&field, &w.alpha);
    rhs.add_assign(&field, &gauge_sum(alg, &w.lambda, &w.alpha, &w.beta));
    differential(alg, &w.lambda).sub(&field, &rhs)
}

pub fn check_gauge<A: Algebra + ?Sized>(alg: &A, w: &GaugeWitness) -> Result<bool> {
    require_degree(alg, &w.lambda, 1, "lambda")?;
    if !is_mc(alg, &w.alpha)? {
        return Err(Error::NotMaurerCartan("alpha"));
    }
    if !is_mc(alg, &w.beta)? {
        return Err(Error::NotMaurerCartan("beta"));
    }
    Ok(gauge_defect(alg, w).is_zero())
}

/// The first `λ` in coefficient order with `check_gauge(α, β, λ)`.
pub fn search_gauge<A: Algebra + ?Sized>(
    alg: &A,
    alpha: &Element,
    beta: &Element,
    cap: usize,
) -> Result<Option<GaugeWitness>> {
    for lambda in span(alg, 1, cap)? {
        let w = GaugeWitness { alpha: alpha.clone(), beta: beta.clone(), lambda };
        if check_gauge(alg, &w)? {
            return Ok(Some(w));
        }
    }
    Ok(None)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Pi0Class {
    /// Index into the MC list of the least member.
    pub rep: usize,
    pub size: usize,
    pub members: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct Pi0 {
    pub mc: Vec<Element>,
    pub classes: Vec<Pi0Class>,
    /// One witness per related ordered pair `(i, j)`, `i ≠ j`.
    pub witnesses: BTreeMap<(usize, usize), Element>,
    pub raw_symmetric: bool,
    pub raw_transitive: bool,
}

/// Components of the graph on MC(alg) whose edges are witnessed gauge
/// pairs, plus whether the raw relation was already an equivalence.
pub fn pi0<A: Algebra + ?Sized>(alg: &A, cap: usize) -> Result<Pi0> {
    let mc = enumerate_mc(alg, cap)?;
    let lambdas = span(alg, 1, cap)?;
    let mut witnesses = BTreeMap::new();
    for (i, alpha) in mc.iter().enumerate() {
        for (j, beta) in mc.iter().enumerate() {
            if i == j {
                continue;
            }
            let found = lambdas.iter().find(|lambda| {
                let w = GaugeWitness { alpha: alpha.clone(), beta: beta.clone(), lambda: (*lambda).clone() };
                gauge_defect(alg, &w).is_zero()
            });
            if let Some(lambda) = found {
                witnesses.insert((i, j), lambda.clone());
            }
        }
    }
    let related: BTreeSet<(usize, usize)> = witnesses.keys().copied().collect();
    let raw_symmetric = related.iter().all(|&(i, j)| related.contains(&(j, i)));
    let raw_transitive = related
        .iter()
        .all(|&(i, j)| related.range((j, 0)..(j + 1, 0)).all(|&(_, k)| k == i || related.contains(&(i, k))));
    let mut uf = UnionFind::<usize>::new(mc.len());
    for &(i, j) in &related {
        uf.union(i, j);
    }
    let mut by_root: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 0..mc.len() {
        by_root.entry(uf.find(i)).or_default().push(i);
    }
    let mut classes: Vec<Pi0Class> =
        by_root.into_values().map(|members| Pi0Class { rep: members[0], size: members.len(), members }).collect();
    classes.sort_by_key(|c| c.rep);
    Ok(Pi0 { mc, classes, witnesses, raw_symmetric, raw_transitive })
}

/// Degree-0 `α` for which `a₀ ↦ α` is a morphism out of the point cobar
/// algebra, i.e. commutes with the differentials on the generator.
pub fn point_morphisms<A: Algebra + ?Sized>(cobar: &FreeAlgebra, alg: &A, cap: usize) -> Result<Vec<Element>> {
    Ok(span(alg, 0, cap)?.into_iter().filter(|a| is_point_morphism(cobar, alg, a)).collect())
}

fn is_point_morphism<A: Algebra + ?Sized>(cobar: &FreeAlgebra, alg: &A, alpha: &Element) -> bool {
    let images = [alpha.clone()];
    cobar.evaluate(alg, &images, &cobar.differential_basis(0)) == differential(alg, alpha)
}

/// Triples `(α, β, λ)` for which `a₀, a₁, a₀₁ ↦ α, β, λ` is a morphism out
/// of the interval cobar algebra.
pub fn interval_morphisms<A: Algebra + ?Sized>(
    cobar: &FreeAlgebra,
    alg: &A,
    cap: usize,
) -> Result<Vec<GaugeWitness>> {
    let points = point_morphisms(cobar, alg, cap)?;
    let lambdas = span(alg, 1, cap)?;
    let mut out = vec![];
    for alpha in &points {
        for beta in &points {
            for lambda in &lambdas {
                let images = [alpha.clone(), beta.clone(), lambda.clone()];
                if cobar.evaluate(alg, &images, &cobar.differential_basis(2)) == differential(alg, lambda) {
                    out.push(GaugeWitness { alpha: alpha.clone(), beta: beta.clone(), lambda: lambda.clone() });
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{BasisEntry, GradedModule, TableAlgebra};
    use crate::free_cobar::{cobar_interval, cobar_point};
    use crate::scalars::PrimeField;
    use crate::simplicial::{homology, ChainComplex};

    const CORPUS: [(&str, &str); 5] = [
        ("abelian_f2", include_str!("../corpus/abelian_f2.json")),
        ("broken_curvature", include_str!("../corpus/broken_curvature.json")),
        ("nilpotent_f2", include_str!("../corpus/nilpotent_f2.json")),
        ("perturbed_relations", include_str!("../corpus/perturbed_relations.json")),
        ("zero", include_str!("../corpus/zero.json")),
    ];

    fn corpus(name: &str) -> TableAlgebra {
        TableAlgebra::from_json(CORPUS.iter().find(|c| c.0 == name).unwrap().1).unwrap()
    }

    fn named(alg: &TableAlgebra, terms: &[(&str, u64)]) -> Element {
        Element::from_terms(&alg.field(), terms.iter().map(|&(n, c)| (alg.module().index_of(n).unwrap(), c)))
    }

    fn abelian(field: PrimeField, degrees: &[i64], d: &[(usize, usize)]) -> TableAlgebra {
        let module = GradedModule::new(
            degrees.iter().enumerate().map(|(i, &k)| BasisEntry { name: format!("e{i}"), degree: k }).collect(),
        )
        .unwrap();
        let mut diff = vec![Element::zero(); degrees.len()];
        for &(from, to) in d {
            diff[from].add_term(&field, to, 1);
        }
        TableAlgebra::abelian(field, module, diff, 2).unwrap()
    }

    #[test]
    fn mc_equation_examples() {
        let ab = corpus("abelian_f2");
        assert!(is_mc(&ab, &named(&ab, &[("x", 1), ("y", 1)])).unwrap());
        assert!(matches!(is_mc(&ab, &named(&ab, &[("u", 1)])), Err(Error::Degree(_))));
        let nil = corpus("nilpotent_f2");
        assert!(is_mc(&nil, &Element::zero()).unwrap());
        assert!(!is_mc(&nil, &named(&nil, &[("x", 1), ("y", 1)])).unwrap());
        let curved = corpus("broken_curvature");
        assert!(!is_mc(&curved, &Element::zero()).unwrap());
    }

    #[test]
    fn enumeration_examples() {
        let f2 = PrimeField::new(2).unwrap();
        // g₀ = F₂², d embedding one generator
        let v = abelian(f2, &[0, 0, -1], &[(0, 2)]);
        assert_eq!(enumerate_mc(&v, DEFAULT_CAP).unwrap(), [Element::zero(), Element::basis(1)]);
        assert_eq!(enumerate_mc(&corpus("zero"), DEFAULT_CAP).unwrap(), [Element::zero()]);
        assert_eq!(enumerate_mc(&corpus("abelian_f2"), DEFAULT_CAP).unwrap().len(), 4);
        let nil = corpus("nilpotent_f2");
        let mc = enumerate_mc(&nil, DEFAULT_CAP).unwrap();
        assert_eq!(mc.len(), 6);
        assert!(mc.contains(&named(&nil, &[("y", 1), ("t", 1)])));
        assert!(!mc.contains(&named(&nil, &[("y", 1)])));
        assert!(matches!(enumerate_mc(&nil, 7), Err(Error::CapExceeded { .. })));
    }

    #[test]
    fn gauge_examples() {
        let ab = corpus("abelian_f2");
        let (x, y, u) = (named(&ab, &[("x", 1)]), named(&ab, &[("y", 1)]), named(&ab, &[("u", 1)]));
        let w = |a: &Element, b: &Element, l: &Element| GaugeWitness { alpha: a.clone(), beta: b.clone(), lambda: l.clone() };
        assert!(check_gauge(&ab, &w(&y, &y, &Element::zero())).unwrap());
        assert!(check_gauge(&ab, &w(&Element::zero(), &x, &u)).unwrap());
        assert!(!check_gauge(&ab, &w(&Element::zero(), &y, &u)).unwrap());
        assert_eq!(search_gauge(&ab, &y, &y, DEFAULT_CAP).unwrap().unwrap().lambda, Element::zero());
        assert!(search_gauge(&ab, &Element::zero(), &y, DEFAULT_CAP).unwrap().is_none());
        let nil = corpus("nilpotent_f2");
        let bad = named(&nil, &[("x", 1), ("y", 1)]);
        let lambda = named(&nil, &[("u", 1)]);
        assert!(matches!(check_gauge(&nil, &w(&bad, &Element::zero(), &lambda)), Err(Error::NotMaurerCartan("alpha"))));
        assert!(matches!(check_gauge(&nil, &w(&Element::zero(), &bad, &lambda)), Err(Error::NotMaurerCartan("beta"))));
        assert!(matches!(check_gauge(&nil, &w(&Element::zero(), &Element::zero(), &bad)), Err(Error::Degree(_))));
    }

    #[test]
    fn acyclic_degree_zero_connects_everything() {
        let f2 = PrimeField::new(2).unwrap();
        let v = abelian(f2, &[1, 1, 0, 0], &[(0, 2), (1, 3)]);
        let mc = enumerate_mc(&v, DEFAULT_CAP).unwrap();
        assert_eq!(mc.len(), 4);
        for a in &mc {
            for b in &mc {
                assert!(search_gauge(&v, a, b, DEFAULT_CAP).unwrap().is_some());
            }
        }
        assert_eq!(pi0(&v, DEFAULT_CAP).unwrap().classes.len(), 1);
    }

    /// Classes from the raw triple loop over (α, β, λ), closed by hand.
    fn triple_loop_classes(alg: &TableAlgebra) -> Vec<Vec<Element>> {
        let mc = enumerate_mc(alg, DEFAULT_CAP).unwrap();
        let lambdas = span(alg, 1, DEFAULT_CAP).unwrap();
        let mut class: Vec<usize> = (0..mc.len()).collect();
        for i in 0..mc.len() {
            for j in 0..mc.len() {
                for l in &lambdas {
                    let w = GaugeWitness { alpha: mc[i].clone(), beta: mc[j].clone(), lambda: l.clone() };
                    if check_gauge(alg, &w).unwrap() {
                        let (from, to) = (class[i].max(class[j]), class[i].min(class[j]));
                        class.iter_mut().filter(|c| **c == from).for_each(|c| *c = to);
                    }
                }
            }
        }
        let mut out: BTreeMap<usize, Vec<Element>> = BTreeMap::new();
        for (i, c) in class.into_iter().enumerate() {
            out.entry(c).or_default().push(mc[i].clone());
        }
        out.into_values().collect()
    }

    fn classes_of(p: &Pi0) -> Vec<Vec<Element>> {
        p.classes.iter().map(|c| c.members.iter().map(|&i| p.mc[i].clone()).collect()).collect()
    }

    #[test]
    fn pi0_matches_the_triple_loop() {
        for name in ["abelian_f2", "nilpotent_f2", "zero", "perturbed_relations"] {
            let alg = corpus(name);
            let p = pi0(&alg, DEFAULT_CAP).unwrap();
            assert_eq!(classes_of(&p), triple_loop_classes(&alg), "{name}");
            assert!(p.raw_symmetric && p.raw_transitive, "{name}");
        }
        let nil = pi0(&corpus("nilpotent_f2"), DEFAULT_CAP).unwrap();
        assert_eq!(nil.classes.iter().map(|c| c.size).collect::<Vec<_>>(), [2, 2, 2]);
    }

    #[test]
    fn abelian_pi0_is_degree_zero_homology() {
        for p in [2, 3] {
            let field = PrimeField::new(p).unwrap();
            for (degrees, d) in [
                (vec![1, 0, 0], vec![(0, 1)]),
                (vec![1, 1, 0, 0, -1], vec![(0, 2), (3, 4)]),
                (vec![2, 1, 0, 0], vec![(0, 1)]),
            ] {
                let alg = abelian(field, &degrees, &d);
                let complex = ChainComplex::new(field, alg.module().clone(), (0..degrees.len()).map(|b| alg.differential_basis(b)).collect()).unwrap();
                let h0 = homology(&complex)[&0];
                assert_eq!(pi0(&alg, DEFAULT_CAP).unwrap().classes.len(), (p as usize).pow(h0 as u32));
            }
        }
    }

    #[test]
    fn point_morphisms_are_mc_elements() {
        for name in ["abelian_f2", "broken_curvature", "nilpotent_f2", "perturbed_relations", "zero"] {
            let alg = corpus(name);
            let cobar = cobar_point(alg.field(), alg.max_degree(), alg.max_arity().max(2), DEFAULT_CAP).unwrap();
            assert_eq!(point_morphisms(&cobar, &alg, DEFAULT_CAP).unwrap(), enumerate_mc(&alg, DEFAULT_CAP).unwrap(), "{name}");
        }
    }

    #[test]
    fn interval_morphisms_are_gauge_triples() {
        for name in ["abelian_f2", "nilpotent_f2", "zero"] {
            let alg = corpus(name);
            let cobar = cobar_interval(alg.field(), alg.max_degree(), alg.max_arity().max(2), DEFAULT_CAP).unwrap();
            let mc = enumerate_mc(&alg, DEFAULT_CAP).unwrap();
            let mut triples = vec![];
            for a in &mc {
                for b in &mc {
                    for l in span(&alg, 1, DEFAULT_CAP).unwrap() {
                        let w = GaugeWitness { alpha: a.clone(), beta: b.clone(), lambda: l };
                        if check_gauge(&alg, &w).unwrap() {
                            triples.push(w);
                        }
                    }
                }
            }
            assert_eq!(interval_morphisms(&cobar, &alg, DEFAULT_CAP).unwrap(), triples, "{name}");
        }
    }
}
