//! One handler per subcommand. Each returns the JSON document to print.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use submeasures::algebra::{canonical_elements, CylinderSpace, FiniteAlgebra, Prefix, Subalgebra};
use submeasures::rational::{format_rational, parse_rational};
use submeasures::submeasure::{
    amalgamate, classify, element_key, functional_to_json, pathological_refinement, uniform_exhaustivity_profile,
    violations, Functional, Violation,
};
use submeasures::talagrand::{
    is_thin, min_weight_cover_with_cap, psi_cylinder, psi_total, verify_inequalities, CoverUniverse, RestrictedPsi,
};
use submeasures::transform::{
    build_levels, incidence_matrix, pullback_submeasure, solve_for_functional, star_free_check, subset_key,
    transform_functional, unbounded_example, StarFreeAlgebra, StarFreeVerdict, UnionMap,
};
use submeasures::{Error, Rational};

use crate::input::{self, cylinder_json, field, read_json};
use crate::{Cli, CmdResult, Command, Failure};

pub(crate) fn dispatch(cli: &Cli) -> CmdResult {
    let cap = cli.global.precision_cap;
    match &cli.command {
        Command::PsiEval { schedule, total: _, prefix } => psi_eval(schedule, prefix.as_deref(), cap),
        Command::CoverSearch { schedule, depth, kmax, target } => cover_search(schedule, *depth, *kmax, target, cap),
        Command::CheckInequalities { schedule, kmax, samples } => check_inequalities(schedule, *kmax, *samples, cap),
        Command::CheckSubmeasure { input } => check_submeasure(input),
        Command::Pathology { input } => pathology(input),
        Command::UniformExhaustivity { input, n } => {
            let mu = input::submeasure(&read_json(input)?)?;
            Ok(json!({"n": n, "value": format_rational(&uniform_exhaustivity_profile(&mu, *n)?)}))
        }
        Command::Amalgamate { input } => amalgamate_cmd(input),
        Command::RefinePathological { input, n } => refine(input, *n),
        Command::ThinCheck { schedule, depth, kmax, set, m, n } => thin_check(schedule, *depth, *kmax, set, *m, *n, cap),
        Command::Transform { input, unbounded, random } => match (input, unbounded, random) {
            (Some(path), _, _) => transform(path),
            (None, Some(n), _) => unbounded_cmd(*n),
            (None, None, Some(n)) => random_round_trip(*n, cli.global.seed),
            _ => Err(Failure::Lib(Error::Format("transform needs --input, --unbounded or --random".into()))),
        },
        Command::Incidence { n } => incidence(*n),
        Command::Pullback { input } => pullback(input),
        Command::Levels { branching, depth, point, generators, generated_by } => {
            levels(branching, *depth, point.as_deref(), generators.as_deref(), generated_by.as_deref())
        }
    }
}

fn rationals(v: &Value) -> Result<Vec<Rational>, Failure> {
    let list = v.as_array().ok_or_else(|| Error::Format("expected a list of rationals".into()))?;
    list.iter()
        .map(|x| match x {
            Value::String(s) => Ok(parse_rational(s)?),
            Value::Number(n) if n.is_i64() => Ok(Rational::from_integer(n.as_i64().unwrap_or_default().into())),
            _ => Err(Failure::Lib(Error::Format(format!("expected a rational string, got {x}")))),
        })
        .collect()
}

fn strings(v: &[Rational]) -> Vec<String> {
    v.iter().map(format_rational).collect()
}

fn psi_eval(schedule: &str, prefix: Option<&str>, cap: u64) -> CmdResult {
    let s = input::schedule(schedule)?;
    let weight = match prefix {
        None => psi_total(&s),
        Some(p) => psi_cylinder(&s, &input::prefix(p)?, cap)?,
    };
    Ok(weight.to_json(cap))
}

fn cover_search(schedule: &str, depth: usize, kmax: usize, target: &str, cap: u64) -> CmdResult {
    let s = input::schedule(schedule)?;
    let space = CylinderSpace::talagrand(depth)?;
    let target = input::target(&space, depth, target)?;
    let found = min_weight_cover_with_cap(&s, CoverUniverse { depth, k_max: kmax }, &target, cap)?;
    Ok(json!({
        "weight": found.weight.to_json(cap),
        "cover": found.cover.iter().map(|d| d.to_json()).collect::<Vec<_>>(),
    }))
}

fn check_inequalities(schedule: &str, kmax: usize, samples: usize, cap: u64) -> CmdResult {
    let s = input::schedule(schedule)?;
    let reports = verify_inequalities(&s, kmax, samples, cap)?;
    let out = json!({
        "passed": reports.iter().all(|r| r.passed()),
        "reports": reports.iter().map(|r| r.to_json(cap)).collect::<Vec<_>>(),
    });
    if reports.iter().any(|r| !r.undecided.is_empty()) {
        return Err(Failure::Undecided(out));
    }
    Ok(out)
}

fn violation_json(v: &Violation) -> Value {
    match v {
        Violation::NonzeroAtZero { value } => json!({"kind": "nonzero-at-zero", "value": format_rational(value)}),
        Violation::Monotonicity { lower, upper } => {
            json!({"kind": "monotonicity", "lower": element_key(*lower), "upper": element_key(*upper)})
        }
        Violation::Subadditivity { left, right } => {
            json!({"kind": "subadditivity", "left": element_key(*left), "right": element_key(*right)})
        }
    }
}

fn check_submeasure(path: &str) -> CmdResult {
    let (f, _) = input::functional(&read_json(path)?)?;
    let found = violations(&f);
    if found.is_empty() {
        return Ok(json!({"valid": true}));
    }
    Ok(json!({"valid": false, "violations": found.iter().map(violation_json).collect::<Vec<_>>()}))
}

fn pathology(path: &str) -> CmdResult {
    let mu = input::submeasure(&read_json(path)?)?;
    let r = classify(&mu);
    Ok(json!({
        "is_measure": r.is_measure,
        "is_strictly_positive": r.is_strictly_positive,
        "pathology_gap": format_rational(&r.pathology_gap),
        "dominated_measure": strings(&r.dominated_measure),
        "n_pathological_max": r.n_pathological_max,
    }))
}

/// `{"atoms": n, "partition": [keys], "mu": table on the blocks, "parts": [table per block]}`.
fn amalgamate_cmd(path: &str) -> CmdResult {
    let v = read_json(path)?;
    let atoms = field(&v, "atoms")?.as_u64().ok_or_else(|| Error::Format("\"atoms\" must be an integer".into()))?;
    let partition = input::partition(FiniteAlgebra::new(atoms as usize)?, field(&v, "partition")?)?;
    let mu = input::submeasure(field(&v, "mu")?)?;
    let parts = field(&v, "parts")?
        .as_array()
        .ok_or_else(|| Error::Format("\"parts\" must be a list".into()))?
        .iter()
        .map(input::submeasure)
        .collect::<Result<Vec<_>, _>>()?;
    Ok(functional_to_json(amalgamate(&mu, &partition, &parts)?.as_functional()))
}

fn refine(path: &str, n: usize) -> CmdResult {
    let p = input::submeasure(&read_json(path)?)?;
    let r = pathological_refinement(&p, n)?;
    Ok(json!({
        "submeasure": functional_to_json(r.submeasure.as_functional()),
        "parents": r.parents.blocks().iter().map(|&b| element_key(b)).collect::<Vec<_>>(),
        "witness": (0..n).map(|l| element_key(r.cross_section(l))).collect::<Vec<_>>(),
    }))
}

fn prefix_text(p: &Prefix) -> String {
    p.assignments().iter().map(|(c, v)| format!("{c}={v}")).collect::<Vec<_>>().join(",")
}

fn thin_check(schedule: &str, depth: usize, kmax: usize, set: &str, m: usize, n: usize, cap: u64) -> CmdResult {
    let s = input::schedule(schedule)?;
    let space = CylinderSpace::talagrand(depth)?;
    let x = input::target(&space, depth, set)?;
    let psi = RestrictedPsi { schedule: s, universe: CoverUniverse { depth, k_max: kmax }, precision_cap: cap };
    let report = is_thin(&space, &x, m, n, &psi, cap)?;
    let witnesses: Vec<Value> = report
        .witnesses
        .iter()
        .map(|w| {
            json!({
                "cylinder": prefix_text(&w.cylinder),
                "piece": cylinder_json(&w.piece),
                "value": w.value.to_json(cap),
                "heavy": w.heavy,
            })
        })
        .collect();
    Ok(json!({"thin": report.thin, "witnesses": witnesses}))
}

/// A table, optionally with `"chain": [[keys], ...]` listing partitions coarsest first.
fn transform(path: &str) -> CmdResult {
    let v = read_json(path)?;
    let (f, _) = input::functional(&v)?;
    let Some(chain) = v.get("chain") else {
        return Ok(solve_for_functional(&f)?.to_json());
    };
    let chain = chain
        .as_array()
        .ok_or_else(|| Error::Format("\"chain\" must be a list of partitions".into()))?
        .iter()
        .map(|p| input::partition(*f.algebra(), p))
        .collect::<Result<Vec<Subalgebra>, _>>()?;
    let solved = transform_functional(&f, &chain)?;
    let coherence = solved.check(&f)?;
    let levels: Vec<Value> = solved
        .levels
        .iter()
        .map(|l| {
            json!({
                "blocks": l.good_map.partition().blocks().iter().map(|&b| element_key(b)).collect::<Vec<_>>(),
                "measure": l.measure.to_json(),
            })
        })
        .collect();
    Ok(json!({
        "levels": levels,
        "coherence": {"round_trips": coherence.round_trips, "pairs": coherence.pairs},
    }))
}

fn unbounded_cmd(n: usize) -> CmdResult {
    let ex = unbounded_example(n)?;
    Ok(json!({
        "n": n,
        "submeasure": functional_to_json(ex.submeasure.as_functional()),
        "measure": ex.measure.to_json(),
        "pair_atoms": ex.pair_atoms.iter().map(|&y| subset_key(y)).collect::<Vec<_>>(),
        "value": format_rational(&ex.value),
    }))
}

/// Solves a random functional with μ(0) = 0 and checks λ(f(a)) = μ(a) for every a.
fn random_round_trip(n: usize, seed: u64) -> CmdResult {
    let alg = FiniteAlgebra::new(n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values: Vec<Rational> = alg
        .elements()
        .map(|a| {
            if a.is_zero() {
                Rational::default()
            } else {
                Rational::new(rng.gen_range(-20i64..=20).into(), rng.gen_range(1i64..=12).into())
            }
        })
        .collect();
    let f = Functional::new(alg, values)?;
    let lambda = solve_for_functional(&f)?;
    let star = StarFreeAlgebra::new(n)?;
    let mut mismatches = 0usize;
    for a in alg.elements() {
        if lambda.value(star.union_of_generators(a.bits())?) != *f.value(a) {
            mismatches += 1;
        }
    }
    let generators = star.all_generators()?;
    let star_free = matches!(star_free_check(&star.algebra()?, &generators), StarFreeVerdict::Free);
    Ok(json!({
        "n": n,
        "seed": seed,
        "functional": functional_to_json(&f),
        "measure": lambda.to_json(),
        "round_trip": mismatches == 0,
        "generators_star_free": star_free,
    }))
}

fn incidence(n: usize) -> CmdResult {
    let m = incidence_matrix(n)?;
    let order: Vec<String> = canonical_elements(n).iter().map(|e| subset_key(e.bits())).collect();
    let rows: Vec<String> = m.rows().iter().map(|r| r.iter().map(|&b| char::from(b'0' + b)).collect()).collect();
    Ok(json!({"n": n, "order": order, "rows": rows, "determinant": m.determinant().to_string()}))
}

/// `{"map": "identity", "atoms": k, "lambda": [...]}`, `{"map": "good", "n": n, "lambda": [...]}`
/// with λ in size-then-lex atom order, or
/// `{"map": "levels", "branching": [...], "depth": d, "n": n, "lambda": [...]}` with λ per leaf of T^(n).
fn pullback(path: &str) -> CmdResult {
    let v = read_json(path)?;
    let count = |name: &str| -> Result<usize, Failure> {
        Ok(field(&v, name)?.as_u64().ok_or_else(|| Error::Format(format!("{name:?} must be an integer")))? as usize)
    };
    let map = match field(&v, "map")?.as_str() {
        Some("identity") => UnionMap::identity(FiniteAlgebra::new(count("atoms")?)?),
        Some("good") => UnionMap::good_map(count("n")?)?,
        Some("levels") => {
            let branching = field(&v, "branching")?
                .as_array()
                .ok_or_else(|| Error::Format("\"branching\" must be a list".into()))?
                .iter()
                .map(|b| b.as_u64().map(|b| b as usize).ok_or_else(|| Error::Format("bad branching value".into())))
                .collect::<Result<Vec<_>, _>>()?;
            build_levels(&branching, count("depth")?)?.union_map(count("n")?)?
        }
        _ => return Err(Failure::Lib(Error::Format("\"map\" must be identity, good or levels".into()))),
    };
    let lambda = rationals(field(&v, "lambda")?)?;
    Ok(functional_to_json(pullback_submeasure(&lambda, &map)?.as_functional()))
}

fn levels(branching: &str, depth: usize, point: Option<&str>, generators: Option<&str>, generated_by: Option<&str>) -> CmdResult {
    let system = build_levels(&input::numbers(branching)?, depth)?;
    let mut out = json!({
        "branching": system.x_space().branching_values(),
        "depth": depth,
        "sizes": (1..=depth).map(|i| system.level_size(i)).collect::<Vec<_>>(),
    });
    if let Some(p) = point {
        let image = system.explicit_f(&Prefix::from_values(&input::numbers(p)?)?)?;
        out["f"] = cylinder_json(&image);
    }
    if let Some(g) = generators {
        out["generators"] = cylinder_json(&system.generators_of(&input::numbers(g)?)?);
    }
    if let Some(list) = generated_by {
        let points = list
            .split(';')
            .map(|p| -> Result<usize, Failure> { Ok(system.x_space().encode(&input::numbers(p)?)?) })
            .collect::<Result<Vec<_>, _>>()?;
        let n = list.split(';').next().map(|p| p.split(',').count()).unwrap_or(0);
        if list.split(';').any(|p| p.split(',').count() != n) {
            return Err(Failure::Lib(Error::Format("all points must have the same length".into())));
        }
        out["generated_by"] = json!(system.f_generated_by(&system.x_space().from_leaves(n, points)?)?);
    }
    Ok(out)
}
