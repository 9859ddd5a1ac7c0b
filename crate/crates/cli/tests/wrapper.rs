//! Each subcommand prints exactly what the library returns for the same input.

mod common;

use serde_json::{json, Value};

use common::{cli, input};
use submeasures::algebra::{cylinder_from_prefix, CylinderSpace, Element, FiniteAlgebra, Prefix, Subalgebra};
use submeasures::rational::{format_rational, rat};
use submeasures::submeasure::{
    amalgamate, classify, functional_from_json, functional_to_json, pathological_refinement,
    uniform_exhaustivity_profile, violations, Submeasure,
};
use submeasures::talagrand::{
    is_thin, min_weight_cover, psi_cylinder, psi_total, verify_inequalities, CoverUniverse, RestrictedPsi, Schedule,
    DEFAULT_PRECISION_CAP,
};
use submeasures::transform::{
    build_levels, incidence_matrix, pullback_submeasure, solve_for_functional, transform_functional, unbounded_example,
    UnionMap,
};

const CAP: u64 = DEFAULT_PRECISION_CAP;

fn parse(args: &[&str]) -> Value {
    let out = cli(args);
    assert_eq!(out.code, 0, "{args:?}: {}{}", out.stdout, out.stderr);
    assert!(out.stdout.ends_with('\n'));
    serde_json::from_str(&out.stdout).unwrap()
}

fn load(name: &str) -> Value {
    serde_json::from_str(&std::fs::read_to_string(input(name)).unwrap()).unwrap()
}

fn submeasure(name: &str) -> Submeasure {
    Submeasure::from_functional(functional_from_json(&load(name)).unwrap().0).unwrap()
}

#[test]
fn psi_eval() {
    let t = Schedule::talagrand();
    assert_eq!(parse(&["psi-eval", "--total"]), psi_total(&t).to_json(CAP));
    let s = Prefix::from_values(&[2, 1]).unwrap();
    assert_eq!(parse(&["psi-eval", "--prefix", "1=2,2=1"]), psi_cylinder(&t, &s, CAP).unwrap().to_json(CAP));
    let toy = r#"{"kind":"table","eta":[4,64],"alpha":["1/3","1/3"]}"#;
    let s = Schedule::small_table(&[4, 64], &["1/3", "1/3"]).unwrap();
    assert_eq!(parse(&["psi-eval", "--schedule", toy, "--total"]), psi_total(&s).to_json(CAP));
}

#[test]
fn cover_search() {
    let t = Schedule::talagrand();
    let space = CylinderSpace::talagrand(3).unwrap();
    let target = cylinder_from_prefix(&space, &Prefix::from_values(&[1]).unwrap(), 3).unwrap();
    let r = min_weight_cover(&t, CoverUniverse { depth: 3, k_max: 2 }, &target).unwrap();
    let expected = json!({"weight": r.weight.to_json(CAP), "cover": r.cover.iter().map(|d| d.to_json()).collect::<Vec<_>>()});
    assert_eq!(parse(&["cover-search", "--depth", "3", "--kmax", "2", "--target", "1=1"]), expected);
    let empty = parse(&["cover-search", "--depth", "2", "--kmax", "1", "--target", "empty"]);
    assert_eq!(empty["weight"]["value"], "0/1");
}

#[test]
fn check_inequalities() {
    let t = Schedule::talagrand();
    let reports = verify_inequalities(&t, 2, 4, CAP).unwrap();
    let got = parse(&["check-inequalities", "--kmax", "2", "--samples", "4"]);
    assert_eq!(got["reports"], Value::Array(reports.iter().map(|r| r.to_json(CAP)).collect()));
    assert_eq!(got["passed"], true);
    // a failing schedule still exits 0 and reports the failure
    let broken = r#"{"kind":"table","eta":[2,4,8],"alpha":["1/4","1/2","1"]}"#;
    let got = parse(&["check-inequalities", "--schedule", broken, "--kmax", "3"]);
    assert_eq!(got["passed"], false);
    assert!(got["reports"][0]["failure"].is_object());
}

#[test]
fn check_submeasure_and_pathology() {
    let bad = functional_from_json(&load("not_subadditive.json")).unwrap().0;
    let got = parse(&["check-submeasure", "--input", &input("not_subadditive.json")]);
    assert_eq!(got["violations"].as_array().unwrap().len(), violations(&bad).len());
    assert_eq!(parse(&["check-submeasure", "--input", &input("three_quarters.json")]), json!({"valid": true}));

    let mu = submeasure("maximum_of_two.json");
    let r = classify(&mu);
    let got = parse(&["pathology", "--input", &input("maximum_of_two.json")]);
    assert_eq!(got["pathology_gap"], format_rational(&r.pathology_gap));
    assert_eq!(got["n_pathological_max"], r.n_pathological_max);
    assert_eq!(got["is_measure"], r.is_measure);
    let got = parse(&["uniform-exhaustivity", "--input", &input("maximum_of_two.json"), "--n", "2"]);
    assert_eq!(got["value"], format_rational(&uniform_exhaustivity_profile(&mu, 2).unwrap()));
}

#[test]
fn amalgamate_and_refine() {
    let v = load("amalgamate.json");
    let sub = |v: &Value| Submeasure::from_functional(functional_from_json(v).unwrap().0).unwrap();
    let alg = FiniteAlgebra::new(4).unwrap();
    let partition = Subalgebra::new(alg, vec![Element::from_bits(0b0011), Element::from_bits(0b1100)]).unwrap();
    let parts: Vec<Submeasure> = v["parts"].as_array().unwrap().iter().map(sub).collect();
    let expected = amalgamate(&sub(&v["mu"]), &partition, &parts).unwrap();
    assert_eq!(parse(&["amalgamate", "--input", &input("amalgamate.json")]), functional_to_json(expected.as_functional()));

    let r = pathological_refinement(&submeasure("uniform_two.json"), 4).unwrap();
    let got = parse(&["refine-pathological", "--input", &input("uniform_two.json"), "--n", "4"]);
    assert_eq!(got["submeasure"], functional_to_json(r.submeasure.as_functional()));
    assert_eq!(got["witness"].as_array().unwrap().len(), 4);
}

#[test]
fn thin_check() {
    let space = CylinderSpace::talagrand(3).unwrap();
    let x = cylinder_from_prefix(&space, &Prefix::from_values(&[1, 1]).unwrap(), 3).unwrap();
    let psi = RestrictedPsi {
        schedule: Schedule::talagrand(),
        universe: CoverUniverse { depth: 3, k_max: 2 },
        precision_cap: CAP,
    };
    let r = is_thin(&space, &x, 1, 2, &psi, CAP).unwrap();
    let got = parse(&["thin-check", "--depth", "3", "--kmax", "2", "--set", "1=1,2=1", "--m", "1", "--n", "2"]);
    assert_eq!(got["thin"], r.thin);
    assert_eq!(got["witnesses"].as_array().unwrap().len(), r.witnesses.len());
    for (w, g) in r.witnesses.iter().zip(got["witnesses"].as_array().unwrap()) {
        assert_eq!(g["value"], w.value.to_json(CAP));
        assert_eq!(g["heavy"], w.heavy);
    }
}

#[test]
fn transform() {
    let f = functional_from_json(&load("three_quarters.json")).unwrap().0;
    assert_eq!(
        parse(&["transform", "--input", &input("three_quarters.json")]),
        solve_for_functional(&f).unwrap().to_json()
    );
    let ex = unbounded_example(5).unwrap();
    let got = parse(&["transform", "--unbounded", "5"]);
    assert_eq!(got["measure"], ex.measure.to_json());
    assert_eq!(got["value"], format_rational(&ex.value));
    assert_eq!(got["value"], format_rational(&rat(-5, 1)));

    let v = load("chain.json");
    let f = functional_from_json(&v).unwrap().0;
    let alg = *f.algebra();
    let chain = vec![
        Subalgebra::new(alg, vec![Element::from_bits(0b001), Element::from_bits(0b110)]).unwrap(),
        Subalgebra::discrete(alg),
    ];
    let solved = transform_functional(&f, &chain).unwrap();
    let got = parse(&["transform", "--input", &input("chain.json")]);
    for (level, g) in solved.levels.iter().zip(got["levels"].as_array().unwrap()) {
        assert_eq!(g["measure"], level.measure.to_json());
    }
    let random = parse(&["transform", "--random", "3", "--seed", "5"]);
    assert_eq!(random["round_trip"], true);
    assert_eq!(parse(&["transform", "--random", "3", "--seed", "5"]), random);
}

#[test]
fn incidence() {
    let m = incidence_matrix(4).unwrap();
    let got = parse(&["incidence", "--n", "4"]);
    assert_eq!(got["determinant"], m.determinant().to_string());
    let rows: Vec<String> = m.rows().iter().map(|r| r.iter().map(|b| b.to_string()).collect()).collect();
    assert_eq!(got["rows"], json!(rows));
}

#[test]
fn pullback_and_levels() {
    let levels = build_levels(&[2, 2], 2).unwrap();
    let third = rat(1, 3);
    let expected = pullback_submeasure(&vec![third; 3], &levels.union_map(1).unwrap()).unwrap();
    assert_eq!(parse(&["pullback", "--input", &input("pullback_levels.json")]), functional_to_json(expected.as_functional()));
    let lambda = [rat(1, 4), rat(1, 4), rat(1, 2)];
    let expected = pullback_submeasure(&lambda, &UnionMap::good_map(2).unwrap()).unwrap();
    assert_eq!(parse(&["pullback", "--input", &input("pullback_good.json")]), functional_to_json(expected.as_functional()));

    let got = parse(&["levels", "--branching", "2,2", "--depth", "2", "--point", "2,2", "--generators", "3,9"]);
    assert_eq!(got["sizes"], json!([3, 9]));
    let f = levels.explicit_f(&Prefix::from_values(&[2, 2]).unwrap()).unwrap();
    assert_eq!(got["f"]["points"], json!(f.points().collect::<Vec<_>>()));
    assert_eq!(got["generators"]["points"].as_array().unwrap().len(), 4);
    let got = parse(&["levels", "--branching", "2,2", "--depth", "2", "--generated-by", "1,2;2,1;2,2"]);
    let a = levels.x_space().from_leaves(2, [1, 2, 3]).unwrap();
    assert_eq!(got["generated_by"], json!(levels.f_generated_by(&a).unwrap()));
}

#[test]
fn errors_are_reported_as_json() {
    let out = cli(&["pathology", "--input", &input("not_subadditive.json")]);
    assert_eq!(out.code, 2);
    let v: Value = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(v["error"]["kind"], "not-submeasure");
    let out = cli(&["pathology", "--input", "/nonexistent/file.json"]);
    assert_eq!(out.code, 2);
    let out = cli(&["psi-eval", "--total", "--prefix", "1=1"]);
    assert_eq!(out.code, 1);
    let out = cli(&["levels", "--branching", "2,2", "--depth", "2", "--generated-by", "1;1,2"]);
    assert_eq!(out.code, 2);
    let out = cli(&["cover-search", "--depth", "2", "--kmax", "1", "--target", "1=9"]);
    assert_eq!(out.code, 2);
    let out = cli(&["psi-eval", "--schedule", "{\"kind\":\"nope\"}", "--total"]);
    assert_eq!(serde_json::from_str::<Value>(&out.stdout).unwrap()["error"]["kind"], "format");
}
