use std::path::PathBuf;
use std::process::Command;

use plinf::algebra::{Algebra, Element, TableAlgebra};
use plinf::cli::{run, Outcome, EXIT_CAP, EXIT_FAIL, EXIT_PASS, EXIT_USAGE};
use plinf::free_cobar::cobar_interval;
use plinf::linalg::rank;
use plinf::mc::{check_gauge, enumerate_mc, interval_morphisms, GaugeWitness, DEFAULT_CAP};
use plinf::simplicial::span_coefficients;
use serde_json::Value;

fn corpus(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("corpus").join(name).to_string_lossy().into_owned()
}

fn plinf(args: &[&str]) -> Outcome {
    run(std::iter::once("plinf").chain(args.iter().copied()))
}

fn json(out: &Outcome) -> Value {
    serde_json::from_str(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}{}", out.stdout, out.stderr))
}

fn load(name: &str) -> TableAlgebra {
    TableAlgebra::from_json(&std::fs::read_to_string(corpus(name)).unwrap()).unwrap()
}

#[test]
fn validate_examples() {
    assert_eq!(plinf(&["validate", &corpus("abelian_f2.json")]).code, EXIT_PASS);
    assert_eq!(plinf(&["validate", &corpus("zero.json")]).code, EXIT_PASS);
    assert_eq!(plinf(&["validate", &corpus("nilpotent_f2.json")]).code, EXIT_PASS);
    let broken = plinf(&["validate", &corpus("broken_curvature.json")]);
    assert_eq!(broken.code, EXIT_FAIL);
    assert_eq!(json(&broken)["violations"][0]["identity"], "curvature");
    let perturbed = plinf(&["validate", &corpus("perturbed_relations.json")]);
    assert_eq!(perturbed.code, EXIT_FAIL);
    assert_eq!(json(&perturbed)["violations"][0]["identity"], "relation");
}

#[test]
fn golden_reports() {
    for (command, file, extra, golden) in [
        ("validate", "broken_curvature.json", None, "golden/broken_curvature.validate.json"),
        ("validate", "perturbed_relations.json", None, "golden/perturbed_relations.validate.json"),
        ("mc", "nilpotent_f2.json", Some("--witnesses"), "golden/nilpotent_f2.mc.json"),
    ] {
        let path = corpus(file);
        let mut args = vec![command, path.as_str()];
        args.extend(extra);
        let out = plinf(&args);
        assert_eq!(out.stdout, std::fs::read_to_string(corpus(golden)).unwrap(), "{golden}");
    }
}

/// Gauge classes by brute force over every `(α, β, λ)`, closed under
/// union, as member index lists.
fn brute_classes(alg: &TableAlgebra) -> Vec<Vec<usize>> {
    let field = alg.field();
    let mc = enumerate_mc(alg, DEFAULT_CAP).unwrap();
    let ones = alg.module().of_degree(1);
    let lambdas: Vec<Element> = span_coefficients(field, ones.len())
        .map(|cs| Element::from_terms(&field, ones.iter().copied().zip(cs)))
        .collect();
    let mut class: Vec<usize> = (0..mc.len()).collect();
    for i in 0..mc.len() {
        for j in 0..mc.len() {
            let related = lambdas.iter().any(|l| {
                let w = GaugeWitness { alpha: mc[i].clone(), beta: mc[j].clone(), lambda: l.clone() };
                check_gauge(alg, &w).unwrap()
            });
            if related {
                let (from, to) = (class[i].max(class[j]), class[i].min(class[j]));
                class.iter_mut().filter(|c| **c == from).for_each(|c| *c = to);
            }
        }
    }
    let mut out: Vec<Vec<usize>> = vec![];
    for root in 0..mc.len() {
        let members: Vec<usize> = (0..mc.len()).filter(|&i| class[i] == root).collect();
        if !members.is_empty() {
            out.push(members);
        }
    }
    out
}

#[test]
fn nilpotent_golden_agrees_with_the_triple_loop() {
    let golden: Value = serde_json::from_str(&std::fs::read_to_string(corpus("golden/nilpotent_f2.mc.json")).unwrap()).unwrap();
    let classes: Vec<Vec<usize>> = golden["pi0"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["members"].as_array().unwrap().iter().map(|m| m.as_u64().unwrap() as usize).collect())
        .collect();
    assert_eq!(classes, brute_classes(&load("nilpotent_f2.json")));
}

#[test]
fn mc_reports() {
    let alg = load("abelian_f2.json");
    let field = alg.field();
    let zero = alg.module().of_degree(0);
    let images: Vec<Element> = zero.iter().map(|&b| alg.differential_basis(b)).collect();
    let cycles = zero.len() - rank(&field, &images);
    let report = json(&plinf(&["mc", &corpus("abelian_f2.json")]));
    assert_eq!(report["mc"].as_array().unwrap().len(), 2usize.pow(cycles as u32));

    let zero = json(&plinf(&["mc", &corpus("zero.json"), "--pi0"]));
    assert_eq!(zero["mc"], serde_json::json!([{}]));
    assert_eq!(zero["pi0"].as_array().unwrap().len(), 1);
    assert_eq!(zero["pi0"][0]["size"], 1);

    let capped = plinf(&["mc", &corpus("nilpotent_f2.json"), "--cap", "4"]);
    assert_eq!(capped.code, EXIT_CAP);
    assert!(capped.stderr.contains("--cap"));
}

#[test]
fn repeated_runs_are_byte_identical() {
    for args in [
        vec!["mc".to_string(), corpus("nilpotent_f2.json"), "--witnesses".into()],
        vec!["generate".into(), "cobar-interval".into(), "--W".into(), "2".into(), "--A".into(), "3".into()],
        vec!["operad".into(), "coleibniz".into(), "--n".into(), "3".into(), "--sample".into(), "4".into(), "--seed".into(), "9".into()],
    ] {
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        assert_eq!(plinf(&args), plinf(&args));
    }
}

#[test]
fn generated_free_algebra_revalidates() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("free.json");
    let out = out.to_str().unwrap();
    let gen = plinf(&["generate", "free", "--W", "2", "--A", "3", "--complex", &corpus("complex_xy.json"), "--out", out]);
    assert_eq!(gen.code, EXIT_PASS, "{}", gen.stderr);
    assert_eq!(std::fs::read_to_string(out).unwrap(), std::fs::read_to_string(corpus("free_W2.json")).unwrap());
    assert_eq!(plinf(&["validate", out]).code, EXIT_PASS);
    assert_eq!(plinf(&["validate", &corpus("free_W2.json")]).code, EXIT_PASS);

    let empty = json(&plinf(&["generate", "free"]));
    assert_eq!(empty["basis"], serde_json::json!([]));
}

#[test]
fn generated_cobar_point_matches_the_truncated_formula() {
    // d(a0) = −cork − c₂^{id}(a0, a0) once tree degree ≤ 1 and two leaves
    let file = json(&plinf(&["generate", "cobar-point", "--p", "3", "--W", "1", "--A", "2"]));
    let names: Vec<&str> = file["basis"].as_array().unwrap().iter().map(|b| b["name"].as_str().unwrap()).collect();
    assert_eq!(names, ["a0", "cork", "c[(12)](a0,a0)"]);
    let d: Vec<(&str, &str, i64)> = file["d"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| (e["from"].as_str().unwrap(), e["to"].as_str().unwrap(), e["coeff"].as_i64().unwrap()))
        .collect();
    assert_eq!(d, [("a0", "cork", -1), ("a0", "c[(12)](a0,a0)", -1)]);
    assert_eq!(file["l0"], serde_json::json!({ "cork": 1 }));
}

#[test]
fn generated_cobar_interval_against_gauge_triples() {
    let file = plinf(&["generate", "cobar-interval", "--W", "2", "--A", "3"]);
    assert_eq!(file.code, EXIT_PASS);
    // The interval differential as displayed does not square to zero.
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("interval.json");
    std::fs::write(&path, &file.stdout).unwrap();
    let report = plinf(&["validate", path.to_str().unwrap()]);
    assert_eq!(report.code, EXIT_FAIL);
    assert!(json(&report)["violations"].as_array().unwrap().iter().all(|v| v["identity"] == "curvature"));

    let cobar = cobar_interval(plinf::scalars::PrimeField::new(2).unwrap(), 2, 3, DEFAULT_CAP).unwrap();
    for name in ["abelian_f2.json", "nilpotent_f2.json", "zero.json"] {
        let alg = load(name);
        let mc = enumerate_mc(&alg, DEFAULT_CAP).unwrap();
        let ones = alg.module().of_degree(1);
        let mut triples = 0;
        for a in &mc {
            for b in &mc {
                for cs in span_coefficients(alg.field(), ones.len()) {
                    let lambda = Element::from_terms(&alg.field(), ones.iter().copied().zip(cs));
                    let w = GaugeWitness { alpha: a.clone(), beta: b.clone(), lambda };
                    triples += usize::from(check_gauge(&alg, &w).unwrap());
                }
            }
        }
        assert_eq!(interval_morphisms(&cobar, &alg, DEFAULT_CAP).unwrap().len(), triples, "{name}");
    }
}

#[test]
fn operad_reports() {
    let duality = json(&plinf(&["operad", "duality", "--n", "2", "--W", "1"]));
    assert_eq!(duality["pass"], true);
    for p in ["2", "3"] {
        let out = plinf(&["operad", "dsquared", "--n", "3", "--W", "2", "--p", p]);
        assert_eq!(out.code, EXIT_PASS);
    }
    let eps = json(&plinf(&["operad", "epsilon", "--n", "2", "--W", "1", "--p", "3"]));
    let values: Vec<(String, u64, i64)> = eps["table"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| (e["label"]["perms"].to_string(), e["s"].as_u64().unwrap(), e["value"].as_i64().unwrap()))
        .collect();
    assert!(values.contains(&("[[1,2]]".into(), 1, 1)));
    assert!(values.contains(&("[[2,1]]".into(), 1, 0)));
    assert!(values.contains(&("[[2,1],[1,2]]".into(), 2, -1)));
    let corks = plinf(&["operad", "coleibniz", "--n", "3", "--W", "1", "--corks"]);
    assert_eq!(corks.code, EXIT_FAIL);
    assert!(json(&corks)["failures"].as_u64().unwrap() > 0);
}

#[test]
fn usage_errors() {
    assert_eq!(plinf(&["frobnicate"]).code, EXIT_USAGE);
    assert_eq!(plinf(&["validate", &corpus("abelian_f2.json"), "--p", "3"]).code, EXIT_USAGE);
    assert_eq!(plinf(&["validate", &corpus("abelian_f2.json"), "--cap", "0"]).code, EXIT_USAGE);
    assert_eq!(plinf(&["generate", "free", "--p", "4"]).code, EXIT_USAGE);
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\n  \"schema\": \"plinf.algebra/1\",\n  \"p\": 2,\n  oops\n}").unwrap();
    let out = plinf(&["validate", bad.to_str().unwrap()]);
    assert_eq!(out.code, EXIT_USAGE);
    let err: Value = serde_json::from_str(&out.stderr).unwrap();
    assert_eq!(err["line"], 4);
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_plinf");
    let code = |args: &[&str]| Command::new(bin).args(args).output().unwrap().status.code();
    assert_eq!(code(&["validate", &corpus("abelian_f2.json")]), Some(EXIT_PASS));
    assert_eq!(code(&["validate", &corpus("broken_curvature.json")]), Some(EXIT_FAIL));
    assert_eq!(code(&["validate"]), Some(EXIT_USAGE));
    assert_eq!(code(&["mc", &corpus("abelian_f2.json"), "--cap", "1"]), Some(EXIT_CAP));
}
