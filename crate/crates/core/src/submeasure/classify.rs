use num_traits::{One, Signed, Zero};

use super::lp::{maximize, LpOutcome};
use super::Submeasure;
use crate::algebra::{Element, FiniteAlgebra};
use crate::error::{Error, Result};
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PropertyReport {
    pub is_measure: bool,
    pub is_strictly_positive: bool,
    /// Largest total mass of a measure dominated by the submeasure.
    pub pathology_gap: Rational,
    /// Atom masses of a measure attaining the gap.
    pub dominated_measure: Vec<Rational>,
    pub n_pathological_max: usize,
}

pub fn classify(mu: &Submeasure) -> PropertyReport {
    let alg = *mu.algebra();
    let atom_values: Vec<Rational> = alg.atoms().map(|a| mu.value(a).clone()).collect();
    let is_measure = alg.elements().all(|a| {
        let sum: Rational = a.atoms().map(|i| &atom_values[i]).sum();
        *mu.value(a) == sum
    });
    let is_strictly_positive = atom_values.iter().all(|v| v.is_positive());
    let (pathology_gap, dominated_measure) = if is_measure {
        (mu.total().clone(), atom_values)
    } else {
        pathology_gap(mu)
    };
    PropertyReport {
        is_measure,
        is_strictly_positive,
        pathology_gap,
        dominated_measure,
        n_pathological_max: n_pathological_max(mu),
    }
}

/// max{ λ(1) : λ additive, 0 ≤ λ ≤ μ } and a maximising λ, by exact LP with
/// lazily added element constraints.
pub fn pathology_gap(mu: &Submeasure) -> (Rational, Vec<Rational>) {
    let alg = *mu.algebra();
    let n = alg.n_atoms();
    let row_for = |a: Element| {
        let coeffs = (0..n)
            .map(|i| if a.meet(Element::atom(i)).is_zero() { Rational::zero() } else { Rational::one() })
            .collect::<Vec<_>>();
        (coeffs, mu.value(a).clone())
    };
    let mut rows: Vec<_> = alg.atoms().map(row_for).collect();
    if n > 1 {
        rows.push(row_for(alg.one()));
    }
    let objective = vec![Rational::one(); n];
    loop {
        let LpOutcome::Optimal { value, point } =
            maximize(&objective, &rows).expect("rows are well formed")
        else {
            unreachable!("atom constraints bound every variable");
        };
        match most_violated(mu, &point) {
            Some(a) => rows.push(row_for(a)),
            None => return (value, point),
        }
    }
}

/// Element maximising λ(a) − μ(a) when that excess is positive.
fn most_violated(mu: &Submeasure, masses: &[Rational]) -> Option<Element> {
    let alg = *mu.algebra();
    let size = alg.size() as usize;
    let mut sums = Vec::with_capacity(size);
    sums.push(Rational::zero());
    let mut best: Option<(Rational, Element)> = None;
    for mask in 1..size {
        let s = &sums[mask & (mask - 1)] + &masses[mask.trailing_zeros() as usize];
        let a = Element::from_bits(mask as u64);
        let excess = &s - mu.value(a);
        if excess.is_positive() && best.as_ref().is_none_or(|(e, _)| excess > *e) {
            best = Some((excess, a));
        }
        sums.push(s);
    }
    best.map(|(_, a)| a)
}

/// Minimal nonzero elements of {a : μ(a) ≥ t}, in increasing bitmask order.
fn minimal_at_least(mu: &Submeasure, t: &Rational) -> Vec<Element> {
    mu.algebra()
        .elements()
        .skip(1)
        .filter(|&a| {
            mu.value(a) >= t
                && a.atoms().all(|i| {
                    let below = a.difference(Element::atom(i));
                    below.is_zero() || mu.value(below) < t
                })
        })
        .collect()
}

/// Finds `want` pairwise disjoint members of `candidates`, scanning atoms in
/// order and trying candidates by increasing bitmask.
fn pack(algebra: &FiniteAlgebra, candidates: &[Element], want: usize) -> Option<Vec<Element>> {
    fn go(
        free: Element,
        by_low: &[Vec<Element>],
        want: usize,
        min_size: u32,
        chosen: &mut Vec<Element>,
    ) -> bool {
        if chosen.len() == want {
            return true;
        }
        if ((free.count() / min_size) as usize) < want - chosen.len() {
            return false;
        }
        let Some(low) = free.first_atom() else {
            return false;
        };
        for &c in &by_low[low] {
            if c.below(free) {
                chosen.push(c);
                if go(free.difference(c), by_low, want, min_size, chosen) {
                    return true;
                }
                chosen.pop();
            }
        }
        go(free.difference(Element::atom(low)), by_low, want, min_size, chosen)
    }

    if want == 0 {
        return Some(Vec::new());
    }
    let min_size = candidates.iter().map(|c| c.count()).min()?;
    let mut by_low = vec![Vec::new(); algebra.n_atoms()];
    for &c in candidates {
        by_low[c.first_atom().expect("nonzero")].push(c);
    }
    let mut chosen = Vec::new();
    go(algebra.one(), &by_low, want, min_size, &mut chosen).then(|| {
        chosen.sort();
        chosen
    })
}

fn value_one_candidates(mu: &Submeasure) -> Vec<Element> {
    let one = Rational::one();
    minimal_at_least(mu, &one).into_iter().filter(|&a| mu.value(a).is_one()).collect()
}

fn n_pathological_max(mu: &Submeasure) -> usize {
    let candidates = value_one_candidates(mu);
    let mut best = 0;
    while pack(mu.algebra(), &candidates, best + 1).is_some() {
        best += 1;
    }
    best
}

/// n pairwise disjoint nonzero elements of value exactly 1, or `None` when
/// no such family exists.
pub fn n_pathological_witness(mu: &Submeasure, n: usize) -> Result<Option<Vec<Element>>> {
    if n == 0 {
        return Err(Error::Range("n must be at least 1".into()));
    }
    if n == 1 && mu.total().is_one() {
        return Ok(Some(vec![mu.algebra().one()]));
    }
    Ok(pack(mu.algebra(), &value_one_candidates(mu), n))
}

/// max over antichains a₁…a_N of nonzero elements of minᵢ μ(aᵢ).
pub fn uniform_exhaustivity_profile(mu: &Submeasure, n: usize) -> Result<Rational> {
    let alg = mu.algebra();
    if n == 0 {
        return Err(Error::Range("N must be at least 1".into()));
    }
    if n > alg.n_atoms() {
        return Err(Error::Infeasible(format!(
            "no antichain of {n} nonzero elements among {} atoms",
            alg.n_atoms()
        )));
    }
    let mut levels: Vec<Rational> = alg.elements().skip(1).map(|a| mu.value(a).clone()).collect();
    levels.sort();
    levels.dedup();
    // feasibility is downward closed in the threshold; levels[0] is always feasible
    // because the atoms themselves form an antichain of size ≥ n
    let (mut lo, mut hi) = (0usize, levels.len() - 1);
    while lo < hi {
        let mid = (lo + hi).div_ceil(2);
        if pack(alg, &minimal_at_least(mu, &levels[mid]), n).is_some() {
            lo = mid;
        } else {
            hi = mid - 1;
        }
    }
    Ok(levels[lo].clone())
}
