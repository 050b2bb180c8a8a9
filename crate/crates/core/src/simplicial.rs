//! Finite chain complexes over F_p, the Dold–Kan functor in levels ≤ 2, and
//! the coalgebra structures on the chains of the point and the interval.

use std::collections::{BTreeMap, HashMap};

use petgraph::unionfind::UnionFind;
use serde::{Deserialize, Serialize};

use crate::algebra::{signed_repr, BasisEntry, DifferentialEntry, Element, GradedModule};
use crate::barratt_eccles::{dual_differential, epsilon_s, BETuple, InsertionRange};
use crate::error::{Error, Result};
use crate::lin::Lin;
use crate::linalg::{nullspace, rank};
use crate::permutations::Permutation;
use crate::scalars::PrimeField;

/// A finite graded module with a differential of degree −1.
#[derive(Debug, Clone)]
pub struct ChainComplex {
    field: PrimeField,
    module: GradedModule,
    d: Vec<Element>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComplexFile {
    pub basis: Vec<BasisEntry>,
    #[serde(default)]
    pub d: Vec<DifferentialEntry>,
}

impl ChainComplex {
    pub fn new(field: PrimeField, module: GradedModule, d: Vec<Element>) -> Result<Self> {
        if d.len() != module.dim() {
            return Err(Error::SizeMismatch { expected: module.dim(), got: d.len() });
        }
        for (b, db) in d.iter().enumerate() {
            if let Some((&k, _)) = db.iter().find(|(&k, _)| k >= module.dim() || module.degree(k) != module.degree(b) - 1)
            {
                return Err(Error::Degree(format!("d({}) has a term {k} outside degree {}", module.name(b), module.degree(b) - 1)));
            }
        }
        let c = ChainComplex { field, module, d };
        if (0..c.dim()).any(|b| !c.differential(&c.d[b]).is_zero()) {
            return Err(Error::NotAComplex);
        }
        Ok(c)
    }

    pub fn from_file(field: PrimeField, file: &ComplexFile) -> Result<Self> {
        let module = GradedModule::new(file.basis.clone())?;
        let mut d = vec![Element::zero(); module.dim()];
        for e in &file.d {
            let (from, to) = (module.index_of(&e.from)?, module.index_of(&e.to)?);
            d[from].add_term(&field, to, field.from_i64(e.coeff));
        }
        Self::new(field, module, d)
    }

    pub fn from_json(field: PrimeField, text: &str) -> Result<Self> {
        Self::from_file(field, &serde_json::from_str(text)?)
    }

    pub fn to_file(&self) -> ComplexFile {
        let mut d = vec![];
        for (b, db) in self.d.iter().enumerate() {
            for (&k, c) in db.iter() {
                d.push(DifferentialEntry {
                    from: self.module.name(b).into(),
                    to: self.module.name(k).into(),
                    coeff: signed_repr(&self.field, c),
                });
            }
        }
        ComplexFile { basis: self.module.entries().to_vec(), d }
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn module(&self) -> &GradedModule {
        &self.module
    }

    pub fn dim(&self) -> usize {
        self.module.dim()
    }

    pub fn differential_basis(&self, b: usize) -> &Element {
        &self.d[b]
    }

    pub fn differential(&self, x: &Element) -> Element {
        x.map_linear(&self.field, |&b| self.d[b].clone())
    }
}

/// `dim ker d − dim im d` in each degree that has basis vectors.
pub fn homology(c: &ChainComplex) -> BTreeMap<i64, usize> {
    let mut rank_out: BTreeMap<i64, usize> = BTreeMap::new();
    let mut dims: BTreeMap<i64, usize> = BTreeMap::new();
    for b in 0..c.dim() {
        *dims.entry(c.module.degree(b)).or_default() += 1;
    }
    for &k in dims.keys() {
        let rows: Vec<Element> = c.module.of_degree(k).into_iter().map(|b| c.d[b].clone()).collect();
        rank_out.insert(k, rank(&c.field, &rows));
    }
    dims.iter()
        .map(|(&k, &n)| {
            let boundaries = rank_out.get(&(k + 1)).copied().unwrap_or(0);
            (k, n - rank_out[&k] - boundaries)
        })
        .collect()
}

/// Normalized chains of `Δⁿ`: one basis vector per nonempty face, named by
/// its vertices (`a0`, `a01`, …), with the alternating face differential.
pub fn simplex_chains(field: PrimeField, n: usize) -> ChainComplex {
    let faces: Vec<Vec<usize>> = {
        let mut faces: Vec<Vec<usize>> = (1..=n + 1)
            .flat_map(|k| itertools::Itertools::combinations(0..=n, k))
            .collect();
        faces.sort_by_key(|f| f.len());
        faces
    };
    let name = |f: &[usize]| format!("a{}", f.iter().map(usize::to_string).collect::<String>());
    let module = GradedModule::new(
        faces.iter().map(|f| BasisEntry { name: name(f), degree: f.len() as i64 - 1 }).collect(),
    )
    .expect("distinct faces");
    let index: HashMap<&Vec<usize>, usize> = faces.iter().enumerate().map(|(i, f)| (f, i)).collect();
    let d = faces
        .iter()
        .map(|f| {
            let mut out = Element::zero();
            if f.len() > 1 {
                for i in 0..f.len() {
                    let mut face = f.clone();
                    face.remove(i);
                    out.add_term(&field, index[&face], field.sign(i as i64));
                }
            }
            out
        })
        .collect();
    ChainComplex::new(field, module, d).expect("simplicial chains")
}

/// Level `n` of the Dold–Kan functor: the degree-0 chain maps `C(Δⁿ) → V`.
#[derive(Debug, Clone)]
pub struct GammaLevel {
    pub n: usize,
    /// Face names of `Δⁿ`, in the order of `simplices[_]`.
    pub faces: Vec<String>,
    /// Dimension of the space of chain maps.
    pub solution_dim: usize,
    /// Every chain map, as the images of the faces.
    pub simplices: Vec<Vec<Element>>,
}

impl GammaLevel {
    pub fn count(&self) -> usize {
        self.simplices.len()
    }
}

/// Every chain map `C(Δⁿ) → V` for `n ≤ 2`, refusing to list more than
/// `cap` of them.
pub fn dold_kan_gamma(v: &ChainComplex, n: usize, cap: usize) -> Result<GammaLevel> {
    if n > 2 {
        return Err(Error::IndexOutOfRange { index: n, max: 2 });
    }
    let f = v.field;
    let simplex = simplex_chains(f, n);
    // unknown (face, basis vector of V in the face's degree) ↦ column
    let mut columns: HashMap<(usize, usize), usize> = HashMap::new();
    let mut layout: Vec<(usize, usize)> = vec![];
    for face in 0..simplex.dim() {
        for b in v.module.of_degree(simplex.module.degree(face)) {
            columns.insert((face, b), layout.len());
            layout.push((face, b));
        }
    }
    // d_V f(F) − f(dF) = 0, one equation per (face, basis vector of V)
    let mut equations: BTreeMap<(usize, usize), Lin<usize>> = BTreeMap::new();
    for (&(face, b), &col) in &columns {
        for (&t, c) in v.d[b].iter() {
            equations.entry((face, t)).or_default().add_term(&f, col, c);
        }
    }
    for face in 0..simplex.dim() {
        for (&g, c) in simplex.d[face].iter() {
            for b in v.module.of_degree(simplex.module.degree(g)) {
                equations.entry((face, b)).or_default().add_term(&f, columns[&(g, b)], f.neg(c));
            }
        }
    }
    let rows: Vec<Lin<usize>> = equations.into_values().collect();
    let basis = nullspace(&f, &rows, layout.len());
    let count = (f.modulus() as u128).checked_pow(basis.len() as u32).unwrap_or(u128::MAX);
    if count > cap as u128 {
        return Err(Error::CapExceeded { what: format!("level {n} of Γ"), needed: count, cap: cap as u128 });
    }
    let mut simplices = vec![];
    for coeffs in span_coefficients(f, basis.len()) {
        let mut sol = Lin::zero();
        for (x, &c) in basis.iter().zip(&coeffs) {
            sol.add_scaled(&f, x, c);
        }
        let mut images = vec![Element::zero(); simplex.dim()];
        for (&col, c) in sol.iter() {
            let (face, b) = layout[col];
            images[face].add_term(&f, b, c);
        }
        simplices.push(images);
    }
    Ok(GammaLevel {
        n,
        faces: (0..simplex.dim()).map(|i| simplex.module.name(i).to_string()).collect(),
        solution_dim: basis.len(),
        simplices,
    })
}

/// All coefficient vectors of length `k` over F_p, in lexicographic order.
pub fn span_coefficients(field: PrimeField, k: usize) -> impl Iterator<Item = Vec<u64>> {
    let p = field.modulus();
    let total = (p as u128).pow(k as u32);
    (0..total).map(move |mut m| {
        (0..k)
            .map(|_| {
                let c = (m % p as u128) as u64;
                m /= p as u128;
                c
            })
            .collect()
    })
}

/// Path components of `Γ(V)`: vertices are level-0 simplices, and each
/// level-1 simplex joins its two endpoints.
pub fn gamma_components(v: &ChainComplex, cap: usize) -> Result<usize> {
    let points = dold_kan_gamma(v, 0, cap)?;
    let paths = dold_kan_gamma(v, 1, cap)?;
    let index: HashMap<&Element, usize> = points.simplices.iter().enumerate().map(|(i, s)| (&s[0], i)).collect();
    let mut uf = UnionFind::<usize>::new(points.count());
    for s in &paths.simplices {
        uf.union(index[&s[0]], index[&s[1]]);
    }
    let mut roots = uf.into_labeling();
    roots.sort_unstable();
    roots.dedup();
    Ok(roots.len())
}

/// One arity/degree component of a structure map: the value on every label
/// `c_n^u`, as a combination of pairs `(u, tensor word)`.
pub type Component = Lin<(BETuple, Vec<usize>)>;

/// The chains of the point and of the interval with their coalgebra
/// structures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Coalgebra {
    Point,
    Interval,
}

impl Coalgebra {
    pub fn chains(self, field: PrimeField) -> ChainComplex {
        simplex_chains(field, self.simplex_dim())
    }

    fn simplex_dim(self) -> usize {
        match self {
            Coalgebra::Point => 0,
            Coalgebra::Interval => 1,
        }
    }

    /// The arity-`n`, label-degree-`r` component on generator `g` (`a0`,
    /// then `a1`, `a01` for the interval). Arity one is the identity.
    pub fn structure_map(self, field: PrimeField, g: usize, n: usize, r: usize) -> Result<Component> {
        let dim = self.chains(field).dim();
        if g >= dim {
            return Err(Error::IndexOutOfRange { index: g, max: dim.saturating_sub(1) });
        }
        let mut out = Lin::zero();
        if n == 1 {
            if r == 0 {
                out.add_term(&field, (BETuple::identity(1), vec![g]), 1);
            }
            return Ok(out);
        }
        if g < 2 {
            if r == 0 {
                for sigma in Permutation::all(n) {
                    let label = BETuple::new(n, vec![sigma]).expect("single entry");
                    out.add_term(&field, (label, vec![g; n]), 1);
                }
            }
            return Ok(out);
        }
        let s = r + 1;
        if n < 2 || s > n {
            return Ok(out);
        }
        for a in 0..=n - s {
            let word: Vec<usize> = [vec![2; s], vec![0; a], vec![1; n - s - a]].concat();
            for w in BETuple::all(n, r) {
                let eps = epsilon_s(&field, &w, s)?;
                if eps == 0 {
                    continue;
                }
                for sigma in Permutation::all(n) {
                    let inv = sigma.inverse();
                    let permuted: Vec<usize> = (1..=n).map(|i| word[inv.apply(i) - 1]).collect();
                    // the s odd letters sit first; count their crossings
                    let crossings = (1..=s)
                        .flat_map(|i| (i + 1..=s).map(move |j| (i, j)))
                        .filter(|&(i, j)| sigma.apply(i) > sigma.apply(j))
                        .count();
                    let c = field.mul(eps, field.sign(crossings as i64));
                    out.add_term(&field, (w.left_act(&sigma), permuted), c);
                }
            }
        }
        Ok(out)
    }

    /// Components of `Δ(dx) − (d₂ ⊗ 1 + (−1)^r 1 ⊗ d)Δ(x)` for every
    /// generator, arity ≤ `max_arity` and label degree ≤ `max_degree`; the
    /// structure map is a chain map iff this is empty.
    pub fn chain_map_defects(self, field: PrimeField, max_arity: usize, max_degree: usize) -> Result<Vec<ChainMapDefect>> {
        let chains = self.chains(field);
        let mut out = vec![];
        for g in 0..chains.dim() {
            for n in 0..=max_arity {
                for r in 0..=max_degree {
                    let mut lhs = Component::zero();
                    for (&h, c) in chains.d[g].iter() {
                        lhs.add_scaled(&field, &self.structure_map(field, h, n, r)?, c);
                    }
                    let mut rhs = Component::zero();
                    if r > 0 {
                        for ((u, word), c) in self.structure_map(field, g, n, r - 1)?.iter() {
                            for (v, e) in dual_differential(&field, u, InsertionRange::Full).iter() {
                                rhs.add_term(&field, (v.clone(), word.clone()), field.mul(c, e));
                            }
                        }
                    }
                    let sign = field.sign(r as i64);
                    for ((u, word), c) in self.structure_map(field, g, n, r)?.iter() {
                        for (dw, e) in word_differential(&field, &chains, word) {
                            rhs.add_term(&field, (u.clone(), dw), field.mul(field.mul(c, e), sign));
                        }
                    }
                    let defect = lhs.sub(&field, &rhs);
                    if !defect.is_zero() {
                        out.push(ChainMapDefect { generator: chains.module.name(g).into(), arity: n, degree: r, defect });
                    }
                }
            }
        }
        Ok(out)
    }
}

#[derive(Debug, Clone)]
pub struct ChainMapDefect {
    pub generator: String,
    pub arity: usize,
    pub degree: usize,
    pub defect: Component,
}

/// The derivation extension of `d` to tensor words, with Koszul signs.
fn word_differential(field: &PrimeField, chains: &ChainComplex, word: &[usize]) -> Vec<(Vec<usize>, u64)> {
    let mut out = vec![];
    let mut prefix = 0;
    for (j, &letter) in word.iter().enumerate() {
        for (&t, c) in chains.d[letter].iter() {
            let mut w = word.to_vec();
            w[j] = t;
            out.push((w, field.mul(c, field.sign(prefix))));
        }
        prefix += chains.module.degree(letter);
    }
    out
}

/// Renames the letters of every word by `map[letter]`.
pub fn relabel_letters(field: &PrimeField, component: &Component, map: &[usize]) -> Component {
    component.map_linear(field, |(u, word)| Lin::basis((u.clone(), word.iter().map(|&l| map[l]).collect())))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructureTerm {
    pub label: BETuple,
    pub word: Vec<String>,
    pub coeff: i64,
}

/// A component as a JSON-ready term list.
pub fn component_terms(field: &PrimeField, coalgebra: Coalgebra, component: &Component) -> Vec<StructureTerm> {
    let chains = coalgebra.chains(*field);
    component
        .iter()
        .map(|((u, word), c)| StructureTerm {
            label: u.clone(),
            word: word.iter().map(|&l| chains.module.name(l).to_string()).collect(),
            coeff: signed_repr(field, c),
        })
        .collect()
}
