//! One test per acceptance criterion. Each prints a single
//! `criterion N: PASS|FAIL` line and fails on a wrong answer or a blown
//! time bound. The `cli` module exercises the command line.

mod cli;

use std::path::PathBuf;
use std::time::{Duration, Instant};

use itertools::Itertools;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use plinf::algebra::{check_relations, Algebra, BasisEntry, Element, GradedModule, TableAlgebra};
use plinf::barratt_eccles::{dual_differential, pairing, partial_compose, partial_decompose, BETuple, InsertionRange};
use plinf::free_cobar::{check_d_squared, cobar_interval, cobar_point, FreeAlgebra, FreeParams};
use plinf::mc::{check_gauge, enumerate_mc, pi0, point_morphisms, GaugeWitness, DEFAULT_CAP};
use plinf::permutations::Permutation;
use plinf::scalars::PrimeField;
use plinf::simplicial::{
    dold_kan_gamma, gamma_components, homology, relabel_letters, simplex_chains, span_coefficients, ChainComplex,
    Coalgebra,
};

fn field(p: u64) -> PrimeField {
    PrimeField::new(p).unwrap()
}

fn verdict(n: usize, ok: bool, detail: &str, start: Instant, bound: Duration) {
    let elapsed = start.elapsed();
    let pass = ok && elapsed < bound;
    println!(
        "criterion {n}: {} ({detail}; {:.2}s of {}s)",
        if pass { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64(),
        bound.as_secs()
    );
    assert!(ok, "criterion {n}: {detail}");
    assert!(elapsed < bound, "criterion {n}: took {elapsed:?}, bound {bound:?}");
}

const CORPUS: [&str; 6] = [
    "abelian_f2.json",
    "broken_curvature.json",
    "free_W2.json",
    "nilpotent_f2.json",
    "perturbed_relations.json",
    "zero.json",
];

fn corpus(name: &str) -> TableAlgebra {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("corpus").join(name);
    TableAlgebra::from_json(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn module(degrees: &[i64]) -> GradedModule {
    GradedModule::new(degrees.iter().enumerate().map(|(i, &k)| BasisEntry { name: format!("g{i}"), degree: k }).collect())
        .unwrap()
}

fn random_complexes(f: PrimeField, degrees: &[i64], count: usize, rng: &mut ChaCha8Rng) -> Vec<ChainComplex> {
    let m = module(degrees);
    let mut out = vec![];
    while out.len() < count {
        let d: Vec<Element> = (0..m.dim())
            .map(|b| {
                let mut x = Element::zero();
                for t in m.of_degree(m.degree(b) - 1) {
                    x.add_term(&f, t, rng.gen_range(0..f.modulus()));
                }
                x
            })
            .collect();
        if let Ok(c) = ChainComplex::new(f, m.clone(), d) {
            out.push(c);
        }
    }
    out
}

fn abelian(v: &ChainComplex) -> TableAlgebra {
    let d = (0..v.dim()).map(|b| v.differential_basis(b).clone()).collect();
    TableAlgebra::abelian(v.field(), v.module().clone(), d, 2).unwrap()
}

#[test]
fn criterion_01_block_decomposition_is_unique() {
    let start = Instant::now();
    let mut cases = 0;
    let mut ok = true;
    for m in 1..=4 {
        for s in Permutation::all(m) {
            for n in 1..=m {
                let k = m + 1 - n;
                for i in 1..=n {
                    cases += 1;
                    let brute: Vec<(Permutation, Permutation)> = Permutation::all(n)
                        .into_iter()
                        .cartesian_product(Permutation::all(k))
                        .filter(|(t, v)| t.block_compose(v, i).unwrap() == s)
                        .collect();
                    ok &= brute.len() <= 1 && s.decompose_block(n, k, i).unwrap() == brute.into_iter().next();
                }
            }
        }
    }
    verdict(1, ok, &format!("{cases} (sigma, n, k, i) cases"), start, Duration::from_secs(5));
}

#[test]
fn criterion_02_decomposition_is_dual_to_composition() {
    let start = Instant::now();
    let mut cases = 0usize;
    let mut bad = 0usize;
    for p in [2, 3] {
        let f = field(p);
        for n in 1..=2 {
            for k in 0..=2 {
                for i in 1..=n {
                    for (a, b) in (0..=1).cartesian_product(0..=1) {
                        for x in BETuple::all(n, a) {
                            for y in BETuple::all(k, b) {
                                let comp = partial_compose(&f, &x, &y, i).unwrap();
                                for z in BETuple::all(n + k - 1, a + b) {
                                    cases += 1;
                                    let dec = partial_decompose(&f, &z, n, k, i).unwrap();
                                    let left = dec.coeff(&(x.clone(), y.clone()));
                                    let right: u64 = comp.iter().map(|(w, c)| f.mul(c, pairing(&z, w).unwrap())).fold(0, |s, t| f.add(s, t));
                                    bad += usize::from(left != right);
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    verdict(2, bad == 0, &format!("{cases} pairings over F2 and F3, {bad} mismatches"), start, Duration::from_secs(30));
}

#[test]
fn criterion_03_dual_differential_squares_to_zero() {
    let start = Instant::now();
    let mut cases = 0;
    let mut bad = 0;
    for p in [2, 3] {
        let f = field(p);
        for range in [InsertionRange::Full, InsertionRange::Displayed] {
            for n in 0..=3 {
                for r in 0..=2 {
                    for w in BETuple::all(n, r) {
                        cases += 1;
                        let dd = dual_differential(&f, &w, range).map_linear(&f, |x| dual_differential(&f, x, range));
                        bad += usize::from(!dd.is_zero());
                    }
                }
            }
        }
    }
    verdict(3, bad == 0, &format!("{cases} tuples, {bad} nonzero"), start, Duration::from_secs(30));
}

#[test]
fn criterion_04_curvature_identity_on_cobar_algebras() {
    let start = Instant::now();
    let mut point_bad = vec![];
    let mut interval_bad = vec![];
    for p in [2, 3] {
        for w in 0..=3 {
            for a in 2..=4 {
                let point = cobar_point(field(p), w, a, DEFAULT_CAP).unwrap();
                if !check_d_squared(&point).is_empty() {
                    point_bad.push(format!("p{p}W{w}A{a}"));
                }
                let interval = cobar_interval(field(p), w, a, DEFAULT_CAP).unwrap();
                let v = check_d_squared(&interval).len();
                if v > 0 {
                    interval_bad.push(format!("p{p}W{w}A{a}:{v}"));
                }
            }
        }
    }
    let detail = format!(
        "point failures [{}], interval failures [{}]",
        point_bad.join(" "),
        interval_bad.join(" ")
    );
    verdict(4, point_bad.is_empty() && interval_bad.is_empty(), &detail, start, Duration::from_secs(60));
}

#[test]
fn criterion_05_relations_on_free_algebras() {
    let start = Instant::now();
    let mut checked = 0;
    let mut bad = vec![];
    for p in [2, 3] {
        let f = field(p);
        for w in 0..=3 {
            for count in 0..=2 {
                for degrees in [-1i64, 0, 1].into_iter().combinations_with_replacement(count) {
                    let m = module(&degrees);
                    // every degree −1 differential between the generators
                    let slots: Vec<(usize, usize)> = (0..count)
                        .cartesian_product(0..count)
                        .filter(|&(s, t)| degrees[t] == degrees[s] - 1)
                        .collect();
                    for coeffs in span_coefficients(f, slots.len()) {
                        let mut d = vec![Element::zero(); count];
                        for (&(s, t), c) in slots.iter().zip(coeffs) {
                            d[s].add_term(&f, t, c);
                        }
                        let params = FreeParams { max_degree: w, leaf_bound: 3, curved: true, cap: DEFAULT_CAP };
                        let alg = FreeAlgebra::on_module(f, m.clone(), &d, params).unwrap();
                        checked += 1;
                        if !check_relations(&alg).is_empty() {
                            bad.push(format!("p{p}W{w}{degrees:?}"));
                        }
                    }
                }
            }
            for a in 2..=3 {
                checked += 1;
                if !check_relations(&cobar_point(f, w, a, DEFAULT_CAP).unwrap()).is_empty() {
                    bad.push(format!("point p{p}W{w}A{a}"));
                }
            }
        }
    }
    let perturbed = check_relations(&corpus("perturbed_relations.json"));
    let localized = perturbed.len() == 1
        && perturbed[0].identity == "relation"
        && perturbed[0].inputs == ["x", "x", "x"]
        && !perturbed[0].composites.is_empty();
    let detail = format!(
        "{checked} free algebras, failures [{}]; perturbed witness localized: {localized}",
        bad.join(" ")
    );
    verdict(5, bad.is_empty() && localized, &detail, start, Duration::from_secs(60));
}

#[test]
fn criterion_06_mc_elements_are_point_morphisms() {
    let start = Instant::now();
    let mut bad = vec![];
    let mut total = 0;
    for name in CORPUS {
        let alg = corpus(name);
        let cobar = cobar_point(alg.field(), alg.max_degree(), alg.max_arity().max(2), DEFAULT_CAP).unwrap();
        let morphisms = point_morphisms(&cobar, &alg, DEFAULT_CAP).unwrap();
        let mc = enumerate_mc(&alg, DEFAULT_CAP).unwrap();
        total += mc.len();
        if morphisms != mc {
            bad.push(name);
        }
    }
    let detail = format!("{} corpus algebras, {total} MC elements, mismatches {bad:?}", CORPUS.len());
    verdict(6, bad.is_empty(), &detail, start, Duration::from_secs(30));
}

#[test]
fn criterion_07_gauge_classes_of_abelian_complexes() {
    let start = Instant::now();
    let f = field(2);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut cases = 0;
    let mut bad = 0;
    for dim in 1..=6 {
        for _ in 0..8 {
            let degrees: Vec<i64> = (0..dim).map(|_| rng.gen_range(-1..=2)).sorted().collect();
            for v in random_complexes(f, &degrees, 2, &mut rng) {
                cases += 1;
                let h0 = homology(&v).get(&0).copied().unwrap_or(0);
                let classes = pi0(&abelian(&v), DEFAULT_CAP).unwrap().classes.len();
                bad += usize::from(classes != 2usize.pow(h0 as u32));
            }
        }
    }
    verdict(7, bad == 0, &format!("{cases} complexes of dimension 1..=6, {bad} mismatches"), start, Duration::from_secs(10));
}

#[test]
fn criterion_08_gauge_is_reflexive() {
    let start = Instant::now();
    let mut checked = 0;
    let mut bad = 0;
    for name in CORPUS {
        let alg = corpus(name);
        for alpha in enumerate_mc(&alg, DEFAULT_CAP).unwrap() {
            checked += 1;
            let w = GaugeWitness { alpha: alpha.clone(), beta: alpha, lambda: Element::zero() };
            bad += usize::from(!check_gauge(&alg, &w).unwrap());
        }
    }
    verdict(8, bad == 0, &format!("{checked} MC elements, {bad} not self-related"), start, Duration::from_secs(5));
}

/// Every degree-0 chain map `C(Δⁿ) → V`, by trying all assignments of
/// images to faces.
fn gamma_oracle(v: &ChainComplex, n: usize) -> usize {
    let f = v.field();
    let simplex = simplex_chains(f, n);
    let choices: Vec<Vec<Element>> = (0..simplex.dim())
        .map(|face| {
            let basis = v.module().of_degree(simplex.module().degree(face));
            span_coefficients(f, basis.len()).map(|cs| Element::from_terms(&f, basis.iter().copied().zip(cs))).collect()
        })
        .collect();
    choices
        .into_iter()
        .multi_cartesian_product()
        .filter(|images| {
            (0..simplex.dim()).all(|face| {
                let mut rhs = Element::zero();
                for (&g, c) in simplex.differential_basis(face).iter() {
                    rhs.add_scaled(&f, &images[g], c);
                }
                v.differential(&images[face]) == rhs
            })
        })
        .count()
}

#[test]
fn criterion_09_dold_kan_levels_and_components() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut cases = 0;
    let mut bad = 0;
    for p in [2, 3] {
        let f = field(p);
        for dim in 1..=4 {
            for _ in 0..4 {
                let degrees: Vec<i64> = (0..dim).map(|_| rng.gen_range(-1..=2)).sorted().collect();
                for v in random_complexes(f, &degrees, 2, &mut rng) {
                    cases += 1;
                    for n in 0..=2 {
                        bad += usize::from(dold_kan_gamma(&v, n, DEFAULT_CAP).unwrap().count() != gamma_oracle(&v, n));
                    }
                    let classes = pi0(&abelian(&v), DEFAULT_CAP).unwrap().classes.len();
                    bad += usize::from(classes != gamma_components(&v, DEFAULT_CAP).unwrap());
                }
            }
        }
    }
    verdict(9, bad == 0, &format!("{cases} complexes of dimension 1..=4, {bad} mismatches"), start, Duration::from_secs(60));
}

#[test]
fn criterion_10_interval_coalgebra() {
    let start = Instant::now();
    let f = field(2);
    let mut restrictions_ok = true;
    for v in [0, 1] {
        for n in 0..=3 {
            for r in 0..=2 {
                let point = Coalgebra::Point.structure_map(f, 0, n, r).unwrap();
                let interval = Coalgebra::Interval.structure_map(f, v, n, r).unwrap();
                restrictions_ok &= relabel_letters(&f, &point, &[v]) == interval;
            }
        }
    }
    let defects = Coalgebra::Interval.chain_map_defects(f, 3, 2).unwrap();
    let first = defects.first().map(|d| format!(", first on {} at arity {} degree {}", d.generator, d.arity, d.degree));
    let detail = format!(
        "vertex restrictions agree: {restrictions_ok}; chain-map defects: {}{}",
        defects.len(),
        first.unwrap_or_default()
    );
    verdict(10, restrictions_ok && defects.is_empty(), &detail, start, Duration::from_secs(60));
}
