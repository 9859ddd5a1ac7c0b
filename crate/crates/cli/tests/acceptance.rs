//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any criterion fails.

mod common;

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

use common::{cases, cli, expected_path, input, invoke};
use submeasures::algebra::{cylinder_from_prefix, CylinderSpace, Element, FiniteAlgebra, Prefix, Subalgebra};
use submeasures::rational::{rat, Rational};
use submeasures::submeasure::{
    amalgamate, extend_min_cover, n_pathological_witness, pathological_refinement, pathology_gap, Functional,
    RelativeSubmeasure, Submeasure,
};
use submeasures::talagrand::{
    compare_with_cap, dsets_as_cylinders, hall_bound_check, is_proper_cover, make_rectangle, min_weight_cover,
    psi_cylinder, psi_total, verify_inequalities, verify_one, Comparison, CoverUniverse, CoverVerdict, DSet, Eta,
    Inequality, Method, Schedule, DEFAULT_PRECISION_CAP,
};
use submeasures::transform::{
    assemble_next, build_levels, incidence_matrix, incidence_matrix_in_order, recursive_order, solve_for_functional,
    unbounded_example, SignedMeasure,
};

const CAP: u64 = DEFAULT_PRECISION_CAP;

type Check = fn() -> Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)*) => {
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if !$cond {
            return Err(format!($($fmt)*));
        }
    };
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn zero() -> Rational {
    Rational::default()
}

/// log₂ w_k(n) = −k + α(k)(log₂ η(k) − log₂ n), in floating point.
fn log2_level_weight(s: &Schedule, k: usize, n: f64) -> f64 {
    let log_eta = match s.eta(k) {
        Eta::Pow2(e) => *e as f64,
        Eta::Int(v) => v.to_string().parse::<f64>().unwrap().log2(),
    };
    let alpha = s.alpha(k);
    let alpha = alpha.numer().to_string().parse::<f64>().unwrap() / alpha.denom().to_string().parse::<f64>().unwrap();
    -(k as f64) + alpha * (log_eta - n.log2())
}

// 1. ψ of the whole space and the two-rectangle bound.
fn psi_of_the_space() -> Result<String, String> {
    let start = Instant::now();
    let out = cli(&["psi-eval", "--schedule", "talagrand", "--total"]);
    ensure!(out.code == 0, "exit code {}", out.code);
    let v: Value = serde_json::from_str(&out.stdout).map_err(|e| e.to_string())?;
    let expected = submeasures::rational::format_rational(&rat(2500, 216));
    ensure!(v["kind"] == "pow2" && v["log2"] == expected.as_str(), "got {}", out.stdout.trim());
    let t = Schedule::talagrand();
    let two = t.weight_u64(1).map_err(|e| e.to_string())?.scale_int(2);
    ensure!(two == psi_total(&t), "ψ differs from 2·w(1)");
    for n in 3u64..=64 {
        let rhs = t.weight_u64(n - 1).map_err(|e| e.to_string())?.scale_int(n);
        let (c, _) = compare_with_cap(&two, &rhs, CAP);
        ensure!(c == Comparison::Less, "2·w(1) < N·w(N−1) fails at N = {n}");
        let margin = (n as f64).log2() + log2_level_weight(&t, 1, (n - 1) as f64) - 2500.0 / 216.0;
        ensure!(margin > 0.0, "float oracle disagrees at N = {n}");
    }
    let elapsed = start.elapsed();
    ensure!(elapsed < Duration::from_secs(1), "took {elapsed:?}");
    Ok(format!("log2 = {expected}, 62 instances, {elapsed:.2?}"))
}

fn toy_schedules() -> Vec<Schedule> {
    vec![
        Schedule::small_table(&[2, 16], &["1/2", "1/2"]).unwrap(),
        Schedule::small_table(&[4, 64], &["1/3", "1/3"]).unwrap(),
        Schedule::small_table(&[2, 64], &["1/3", "1/4"]).unwrap(),
    ]
}

/// Every prefix whose coordinates lie in [depth].
fn prefixes_within(space: &CylinderSpace, depth: usize) -> Vec<Prefix> {
    let mut out = vec![BTreeMap::new()];
    for n in 1..=depth {
        let mut next = Vec::new();
        for p in &out {
            next.push(p.clone());
            for v in 1..=space.branching(n) {
                let mut q = p.clone();
                q.insert(n, v);
                next.push(q);
            }
        }
        out = next;
    }
    out.into_iter().map(|m| Prefix::new(m).unwrap()).collect()
}

// 2. Closed forms against the cover search.
fn closed_forms_match_search() -> Result<String, String> {
    let start = Instant::now();
    let space = CylinderSpace::talagrand(4).unwrap();
    let universe = CoverUniverse { depth: 4, k_max: 2 };
    let prefixes = prefixes_within(&space, 4);
    let mut checked = 0;
    for (i, s) in toy_schedules().iter().enumerate() {
        for r in verify_inequalities(s, 2, 16, CAP).map_err(|e| e.to_string())? {
            ensure!(r.passed(), "toy schedule {i} fails {}", r.inequality.name());
        }
        let whole = min_weight_cover(s, universe, &space.full(0).unwrap()).map_err(|e| e.to_string())?;
        ensure!(whole.weight == psi_total(s), "schedule {i}: ψ total differs from search");
        for p in &prefixes {
            let target = cylinder_from_prefix(&space, p, 4).unwrap();
            let found = min_weight_cover(s, universe, &target).map_err(|e| e.to_string())?;
            let closed = psi_cylinder(s, p, CAP).map_err(|e| e.to_string())?;
            let (c, _) = compare_with_cap(&found.weight, &closed, CAP);
            ensure!(c == Comparison::Equal, "schedule {i}, prefix {p:?}: {:?} vs {:?}", found.weight, closed);
            checked += 1;
        }
    }
    let elapsed = start.elapsed();
    ensure!(elapsed < Duration::from_secs(300), "took {elapsed:?}");
    Ok(format!("3 schedules, {checked} prefixes, {elapsed:.2?}"))
}

/// Points at `depth` inside the D-set, by the defining condition.
fn dset_member(x: &DSet, point: &[usize]) -> bool {
    x.excluded().iter().all(|(&n, &t)| point[n - 1] != t)
}

/// Covers every point, and every member covers some point alone.
fn proper_by_enumeration(space: &CylinderSpace, family: &[DSet], depth: usize) -> bool {
    let mut alone = vec![false; family.len()];
    for leaf in 0..space.leaf_count(depth).unwrap() {
        let p = space.decode(depth, leaf);
        let hits: Vec<usize> = (0..family.len()).filter(|&i| dset_member(&family[i], &p)).collect();
        match hits.len() {
            0 => return false,
            1 => alone[hits[0]] = true,
            _ => {}
        }
    }
    alone.iter().all(|&a| a)
}

fn random_rectangle(r: &mut impl Rng, space: &CylinderSpace) -> Vec<DSet> {
    let depth = space.max_depth();
    let feasible = (2..=6).filter(|&rows| (1..=depth).filter(|&n| space.branching(n) >= rows).count() >= rows - 1);
    let rows = r.gen_range(2..=feasible.max().unwrap());
    let usable: Vec<usize> = (1..=depth).filter(|&n| space.branching(n) >= rows).collect();
    let mut index: Vec<usize> = usable.choose_multiple(r, rows - 1).copied().collect();
    index.sort();
    let values: BTreeMap<usize, Vec<usize>> = index
        .iter()
        .map(|&n| {
            let mut v: Vec<usize> = (1..=space.branching(n)).collect();
            v.shuffle(r);
            (n, v[..rows].to_vec())
        })
        .collect();
    (0..rows).map(|row| DSet::new(index.iter().map(|&n| (n, values[&n][row])).collect()).unwrap()).collect()
}

fn random_proper_cover(r: &mut impl Rng, space: &CylinderSpace) -> Vec<DSet> {
    let depth = space.max_depth();
    loop {
        let mut family: Vec<DSet> = Vec::new();
        while family.len() < 12 {
            let mut pairs = BTreeMap::new();
            for n in 1..=depth {
                if r.gen_bool(0.5) {
                    pairs.insert(n, r.gen_range(1..=space.branching(n).min(3)));
                }
            }
            if !pairs.is_empty() {
                family.push(DSet::new(pairs).unwrap());
            }
            let covered = (0..space.leaf_count(depth).unwrap())
                .all(|l| family.iter().any(|x| dset_member(x, &space.decode(depth, l))));
            if covered {
                break;
            }
        }
        // drop members until every remaining one is needed
        let mut i = 0;
        while i < family.len() {
            let rest: Vec<DSet> = family.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, x)| x.clone()).collect();
            let covers = !rest.is_empty()
                && (0..space.leaf_count(depth).unwrap())
                    .all(|l| rest.iter().any(|x| dset_member(x, &space.decode(depth, l))));
            if covers {
                family = rest;
            } else {
                i += 1;
            }
        }
        if proper_by_enumeration(space, &family, depth) {
            return family;
        }
    }
}

// 3. Rectangles are proper covers and proper covers satisfy the Hall bound.
fn rectangles_and_hall() -> Result<String, String> {
    let mut r = rng(3);
    for i in 0..1000 {
        let space = CylinderSpace::talagrand(r.gen_range(3..=5)).unwrap();
        let rect = random_rectangle(&mut r, &space);
        let d = rect.iter().map(DSet::max_coordinate).max().unwrap();
        ensure!(proper_by_enumeration(&space, &rect, d), "rectangle {i} fails the enumeration oracle");
        let cyl = dsets_as_cylinders(&space, &rect, d).unwrap();
        let verdict = is_proper_cover(&cyl, &space.full(d).unwrap()).map_err(|e| e.to_string())?;
        ensure!(verdict == CoverVerdict::Proper, "rectangle {i}: {verdict:?}");
        let built = make_rectangle(rect.len(), &rect[0].index_set()).map_err(|e| e.to_string())?;
        ensure!(proper_by_enumeration(&space, &built, d), "built rectangle {i} is not proper");
    }
    for i in 0..500 {
        let space = CylinderSpace::talagrand(r.gen_range(2..=4)).unwrap();
        let family = random_proper_cover(&mut r, &space);
        let check = hall_bound_check(&space, &family).map_err(|e| format!("cover {i}: {e}"))?;
        let union: std::collections::BTreeSet<usize> = family.iter().flat_map(|x| x.excluded().keys().copied()).collect();
        ensure!(check.passed && union.len() < family.len(), "cover {i} breaks |∪I| ≤ |F| − 1");
    }
    Ok("1000 rectangles proper, 500 proper covers within the Hall bound".into())
}

/// Atom values by inclusion–exclusion over the complements.
fn mobius(mu: &Functional, y: u64) -> Rational {
    let full = mu.algebra().one().bits();
    let g = |s: u64| mu.total() - mu.value(Element::from_bits(full & !s));
    Element::from_bits(y)
        .subsets()
        .map(|s| if (y.count_ones() - s.bits().count_ones()).is_multiple_of(2) { g(s.bits()) } else { -g(s.bits()) })
        .sum()
}

// 4. The worked transform examples.
fn worked_examples() -> Result<String, String> {
    let out = cli(&["transform", "--input", &input("three_quarters.json")]);
    ensure!(out.code == 0, "exit code {}", out.code);
    let v: Value = serde_json::from_str(&out.stdout).map_err(|e| e.to_string())?;
    ensure!(
        v["atoms"]["1"] == "1/4" && v["atoms"]["2"] == "1/4" && v["atoms"]["1,2"] == "1/2",
        "got {}",
        out.stdout.trim()
    );
    for n in 3..=6usize {
        let ex = unbounded_example(n).map_err(|e| e.to_string())?;
        let pairs = (n * (n - 1) / 2) as i64;
        ensure!(ex.value == rat(-pairs, 2), "n = {n}: {}", ex.value);
        let by_mobius: Rational = ex.pair_atoms.iter().map(|&y| mobius(ex.submeasure.as_functional(), y)).sum();
        ensure!(by_mobius == ex.value, "n = {n}: inclusion–exclusion gives {by_mobius}");
    }
    Ok("3/4 example gives (1/4, 1/4, 1/2); pair unions give −C(n,2)/2 for n = 3..6".into())
}

fn random_functional(r: &mut impl Rng, n: usize) -> Functional {
    let alg = FiniteAlgebra::new(n).unwrap();
    let values = (0..1u64 << n).map(|b| if b == 0 { zero() } else { rat(r.gen_range(-12..=12), r.gen_range(1..=6)) });
    Functional::new(alg, values.collect()).unwrap()
}

fn value_on_union(lambda: &SignedMeasure, q: u64) -> Rational {
    lambda.algebra().atom_subsets().iter().filter(|&&y| y & q != 0).map(|&y| lambda.atom_value(y).clone()).sum()
}

// 5. Round trip and linearity.
fn round_trip_and_linearity() -> Result<String, String> {
    let mut r = rng(5);
    for i in 0..200 {
        let n = r.gen_range(1..=5);
        let (mu, nu) = (random_functional(&mut r, n), random_functional(&mut r, n));
        let (a, b) = (rat(r.gen_range(-5..=5), r.gen_range(1..=3)), rat(r.gen_range(-5..=5), r.gen_range(1..=3)));
        let lm = solve_for_functional(&mu).map_err(|e| e.to_string())?;
        let ln = solve_for_functional(&nu).map_err(|e| e.to_string())?;
        for e in mu.algebra().elements() {
            ensure!(value_on_union(&lm, e.bits()) == *mu.value(e), "case {i}: round trip fails at {e:?}");
        }
        let mix = Functional::from_fn(*mu.algebra(), |e| &a * mu.value(e) + &b * nu.value(e)).unwrap();
        let lmix = solve_for_functional(&mix).map_err(|e| e.to_string())?;
        let combined = lm.scale(&a).add(&ln.scale(&b)).map_err(|e| e.to_string())?;
        ensure!(lmix == combined, "case {i}: linearity fails");
    }
    Ok("200 functionals on n ≤ 5 atoms".into())
}

fn rational_determinant(rows: &[Vec<u8>]) -> Rational {
    let mut m: Vec<Vec<Rational>> = rows.iter().map(|r| r.iter().map(|&x| rat(x as i64, 1)).collect()).collect();
    let n = m.len();
    let mut det = rat(1, 1);
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| m[i][c] != zero()) else {
            return zero();
        };
        if p != c {
            m.swap(p, c);
            det = -det;
        }
        det *= m[c][c].clone();
        for i in c + 1..n {
            let f = &m[i][c] / &m[c][c];
            let pivot_row = m[c].clone();
            for (x, p) in m[i].iter_mut().zip(&pivot_row).skip(c) {
                *x -= &f * p;
            }
        }
    }
    det
}

// 6. Incidence matrices.
fn incidence_matrices() -> Result<String, String> {
    for n in 1..=8 {
        let m = incidence_matrix(n).map_err(|e| e.to_string())?;
        ensure!(m.determinant() != 0.into(), "singular at n = {n}");
        if n <= 6 {
            ensure!(Rational::from_integer(m.determinant()) == rational_determinant(m.rows()), "n = {n}: oracle disagrees");
        }
    }
    let mut assembled = incidence_matrix_in_order(&recursive_order(1).unwrap());
    for n in 2..=6 {
        assembled = assemble_next(&assembled);
        // entry (i, j) is 1 exactly when the subsets meet
        let order = recursive_order(n).unwrap();
        for (i, a) in order.iter().enumerate() {
            for (j, b) in order.iter().enumerate() {
                ensure!(assembled.get(i, j) == u8::from(a & b != 0), "n = {n}: entry ({i}, {j})");
            }
        }
    }
    Ok("det ≠ 0 for n ≤ 8; block assembly exact for n ≤ 6".into())
}

// 7. Generators on binary levels.
fn binary_levels() -> Result<String, String> {
    let levels = build_levels(&[2, 2, 2], 3).map_err(|e| e.to_string())?;
    let (x, t) = (levels.x_space(), levels.t_space());
    let mut sets = 0;
    for n in 1..=3 {
        let members: Vec<Vec<Vec<Vec<usize>>>> = (1..=n)
            .map(|i| (1..=levels.level_size(i)).map(|v| levels.level_member(i, v).unwrap().points().collect()).collect())
            .collect();
        let mut seen = std::collections::BTreeSet::new();
        for leaf in 0..t.leaf_count(n).unwrap() {
            let f = t.decode(n, leaf);
            // t is a generator when each initial segment lies in the chosen member
            let direct: Vec<Vec<usize>> = x
                .full(n)
                .unwrap()
                .points()
                .filter(|p| (1..=n).all(|i| members[i - 1][f[i - 1] - 1].contains(&p[..i].to_vec())))
                .collect();
            let g = levels.generators_of(&f).map_err(|e| e.to_string())?;
            ensure!(g.points().collect::<Vec<_>>() == direct, "depth {n}, f = {f:?}");
            ensure!(!direct.is_empty(), "f = {f:?} has no generator");
            seen.insert(direct);
        }
        let points = x.leaf_count(n).unwrap();
        ensure!(seen.len() == (1 << points) - 1, "depth {n}: not every nonempty set is a generator set");
        for mask in 1u64..1 << points {
            let a = x.from_leaves(n, (0..points).filter(|l| mask >> l & 1 == 1)).unwrap();
            let f = levels.f_generated_by(&a).map_err(|e| e.to_string())?;
            ensure!(levels.generators_of(&f).unwrap() == a, "depth {n}: round trip fails for {mask:b}");
            sets += 1;
        }
    }
    Ok(format!("depth ≤ 3, {sets} generator sets round-trip"))
}

/// The pointwise maximum of a few random measures, scaled to total 1.
fn random_submeasure(r: &mut impl Rng, n: usize) -> Submeasure {
    let alg = FiniteAlgebra::new(n).unwrap();
    let measures: Vec<Vec<Rational>> =
        (0..r.gen_range(1..=3)).map(|_| (0..n).map(|_| rat(r.gen_range(0..=6), r.gen_range(1..=4))).collect()).collect();
    let raw = |e: Element| -> Rational { measures.iter().map(|m| e.atoms().map(|i| &m[i]).sum::<Rational>()).max().unwrap() };
    let total = raw(alg.one());
    if total == zero() {
        return Submeasure::uniform(alg).unwrap();
    }
    Submeasure::new(alg, alg.elements().map(|e| raw(e) / &total).collect()).unwrap()
}

fn random_partition(r: &mut impl Rng, ambient: FiniteAlgebra, blocks: usize) -> Subalgebra {
    let n = ambient.n_atoms();
    let mut atoms: Vec<usize> = (0..n).collect();
    atoms.shuffle(r);
    let mut cuts: Vec<usize> = (1..n).collect();
    cuts.shuffle(r);
    let mut cuts = cuts[..blocks - 1].to_vec();
    cuts.sort();
    let mut parts = Vec::new();
    let mut start = 0;
    for end in cuts.into_iter().chain([n]) {
        parts.push(Element::from_atoms(atoms[start..end].iter().copied()));
        start = end;
    }
    parts.sort_by_key(|b| b.first_atom());
    Subalgebra::new(ambient, parts).unwrap()
}

/// Zero at zero, monotone along single-atom steps, and subadditive on every
/// disjoint pair (enumerated as submasks of complements).
fn is_submeasure(mu: &Functional) -> bool {
    let alg = mu.algebra();
    let one = alg.one();
    if *mu.value(Element::ZERO) != zero() {
        return false;
    }
    for a in alg.elements() {
        let rest = one.bits() & !a.bits();
        if (0..alg.n_atoms()).any(|i| rest >> i & 1 == 1 && mu.value(a) > mu.value(a.join(Element::atom(i)))) {
            return false;
        }
        // b ranges over nonempty submasks of the complement with b > a, so each pair is seen once
        let mut b = rest;
        while b != 0 {
            if b > a.bits() {
                let be = Element::from_bits(b);
                if *mu.value(a.join(be)) > mu.value(a) + mu.value(be) {
                    return false;
                }
            }
            b = (b - 1) & rest;
        }
    }
    true
}

// 8. The constructions.
fn constructions() -> Result<String, String> {
    let pair = FiniteAlgebra::new(2).unwrap();
    for bad in [[0, 1, 1, 4], [0, 2, 1, 1]] {
        let f = Functional::new(pair, bad.iter().map(|&v| rat(v, 4)).collect()).unwrap();
        ensure!(!is_submeasure(&f), "the axiom oracle accepts {bad:?}");
    }
    let mut r = rng(8);
    for i in 0..200 {
        let k = r.gen_range(1..=3);
        let n = r.gen_range(k..=k + 4).min(8);
        let fine = FiniteAlgebra::new(n).unwrap();
        let partition = random_partition(&mut r, fine, k);
        let mu = random_submeasure(&mut r, k);
        let parts: Vec<Submeasure> = partition.blocks().iter().map(|b| random_submeasure(&mut r, b.count() as usize)).collect();
        let phi = amalgamate(&mu, &partition, &parts).map_err(|e| e.to_string())?;
        ensure!(is_submeasure(phi.as_functional()), "instance {i}: amalgamation is not a submeasure");
        for local in partition.local_algebra().elements() {
            ensure!(phi.value(partition.embed(local)) == mu.value(local), "instance {i}: differs from μ on blocks");
        }
        for (b, block) in partition.blocks().iter().enumerate() {
            let atoms: Vec<usize> = block.atoms().collect();
            for sub in Element::from_bits((1 << atoms.len()) - 1).subsets() {
                let inside = Element::from_atoms(sub.atoms().map(|j| atoms[j]));
                let expected = mu.value(Element::atom(b)) * parts[b].value(sub);
                ensure!(*phi.value(inside) == expected, "instance {i}: block {b} is not μ(a)·φ");
            }
        }
        let relative = RelativeSubmeasure::new(partition.clone(), mu.clone()).map_err(|e| e.to_string())?;
        let c = Element::from_bits(r.gen::<u64>()).meet(fine.one());
        let extended = extend_min_cover(&relative, c).map_err(|e| e.to_string())?;
        ensure!(is_submeasure(extended.submeasure().as_functional()), "instance {i}: extension is not a submeasure");
        for local in partition.local_algebra().elements() {
            ensure!(extended.value(partition.embed(local)) == Some(mu.value(local)), "instance {i}: extension changes μ");
        }
        ensure!(extended.value(c).is_some(), "instance {i}: c is outside the extended domain");
    }
    for pieces in 2..=8 {
        let k = (16 / pieces).min(3);
        let p = random_submeasure(&mut r, k);
        let q = pathological_refinement(&p, pieces).map_err(|e| e.to_string())?;
        ensure!(is_submeasure(q.submeasure.as_functional()), "refinement into {pieces} is not a submeasure");
        let sections: Vec<Element> = (0..pieces).map(|l| q.cross_section(l)).collect();
        for (a, x) in sections.iter().enumerate() {
            ensure!(*q.submeasure.value(*x) == rat(1, 1), "cross-section {a} has value {}", q.submeasure.value(*x));
            ensure!(sections[..a].iter().all(|y| y.is_disjoint(*x)), "cross-sections overlap");
        }
        let w = n_pathological_witness(&q.submeasure, pieces).map_err(|e| e.to_string())?;
        ensure!(w.is_some(), "no witness for n = {pieces}");
    }
    Ok("200 amalgamations and extensions, refinements for n = 2..8".into())
}

// 9. The pathology gap.
fn pathology_gaps() -> Result<String, String> {
    let alg = FiniteAlgebra::new(16).unwrap();
    let uniform = Submeasure::uniform(alg).map_err(|e| e.to_string())?;
    let (gap, _) = pathology_gap(&uniform);
    ensure!(gap == rat(1, 1), "uniform on 16 atoms has gap {gap}");
    let mut r = rng(9);
    for i in 0..200 {
        let n = r.gen_range(1..=6);
        let mu = random_submeasure(&mut r, n);
        let (gap, lambda) = pathology_gap(&mu);
        let total = mu.total().clone();
        ensure!(gap <= total && gap >= &total / rat(n as i64, 1), "case {i}: gap {gap} outside bounds");
        ensure!(lambda.iter().sum::<Rational>() == gap, "case {i}: witness mass differs");
        for e in mu.algebra().elements() {
            ensure!(e.atoms().map(|a| &lambda[a]).sum::<Rational>() <= *mu.value(e), "case {i}: witness not dominated");
        }
        // a point mass μ({a}) on one atom is dominated because μ is monotone
        let point_mass: Rational = (0..n).map(|a| mu.value(Element::atom(a)).clone()).max().unwrap();
        ensure!(gap >= point_mass, "case {i}: gap below a dominated point mass");
    }
    Ok("uniform on 16 atoms has gap 1; bounds hold on 200 random cases".into())
}

// 10. The inequality verifier.
fn inequality_verifier() -> Result<String, String> {
    let t = Schedule::talagrand();
    let mut checked = 0;
    for r in verify_inequalities(&t, 5, 16, CAP).map_err(|e| e.to_string())? {
        ensure!(r.passed(), "{} fails: {:?}", r.inequality.name(), r.failure.map(|f| f.params));
        ensure!(r.methods.interval == 0, "{} used {} interval comparisons", r.inequality.name(), r.methods.interval);
        checked += r.checked;
    }
    let broken = Schedule::small_table(&[2, 4, 8], &["1/4", "1/2", "1"]).unwrap();
    let r = verify_one(&broken, Inequality::LevelIncrease, 3, 16, CAP);
    let f = r.failure.ok_or("the broken schedule passes level-increase")?;
    let k: usize = f.params[0].1.to_string().parse().unwrap();
    let n: f64 = f.params[1].1.to_string().parse().unwrap();
    let (lhs, rhs) = (log2_level_weight(&broken, k, n), log2_level_weight(&broken, k + 1, n));
    ensure!(lhs >= rhs, "witness k = {k}, n = {n} does not violate: {lhs} < {rhs}");
    ensure!((f.lhs.approx_f64().log2() - lhs).abs() < 1e-9, "witness lhs mismatch");
    let (c, m) = compare_with_cap(&f.lhs, &f.rhs, CAP);
    ensure!(c != Comparison::Less && !matches!(m, Method::Interval { .. }), "witness comparison {c:?} by {m:?}");
    Ok(format!("{checked} instances, none by interval; broken schedule fails at k = {k}, n = {n}"))
}

// 11. Golden files.
fn golden_files() -> Result<String, String> {
    let all = cases();
    let canonical = &all[..10];
    for case in &all {
        let first = invoke(&case.args, &[]);
        ensure!(first.code == case.code, "{}: exit code {}", case.name, first.code);
        let recorded = std::fs::read_to_string(expected_path(case)).map_err(|e| format!("{}: {e}", case.name))?;
        ensure!(first.stdout == recorded, "{}: differs from the recording", case.name);
    }
    for case in canonical {
        let base = invoke(&case.args, &[]);
        for threads in ["1", "2", "4"] {
            for _ in 0..2 {
                let again = invoke(&case.args, &["--threads", threads]);
                ensure!(again.stdout.as_bytes() == base.stdout.as_bytes(), "{} with {threads} threads", case.name);
            }
        }
    }
    Ok(format!("{} canonical invocations stable across runs and threads; {} recordings match", canonical.len(), all.len()))
}

fn main() {
    let criteria: [(&str, Check); 11] = [
        ("psi of the whole space", psi_of_the_space),
        ("closed forms equal cover search", closed_forms_match_search),
        ("rectangles and Hall bound", rectangles_and_hall),
        ("worked transform examples", worked_examples),
        ("transform round trip and linearity", round_trip_and_linearity),
        ("incidence matrices", incidence_matrices),
        ("generators on binary levels", binary_levels),
        ("constructions", constructions),
        ("pathology gap", pathology_gaps),
        ("inequality verifier", inequality_verifier),
        ("golden files", golden_files),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            Err(e.downcast_ref::<String>().cloned().or(e.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
        });
        match result {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail} [{:.1?}]", i + 1, start.elapsed()),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {why}", i + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
