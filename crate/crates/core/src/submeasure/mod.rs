//! Exact-rational submeasure tables on finite algebras.

mod classify;
mod construct;
mod json;
mod lp;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::algebra::{Element, FiniteAlgebra};
use crate::error::{Error, Result};
use crate::rational::Rational;

pub use classify::{
    classify, n_pathological_witness, pathology_gap, uniform_exhaustivity_profile, PropertyReport,
};
pub use construct::{
    amalgamate, exhaustive_stage_extension, extend_min_cover, pathological_refinement, Refinement,
    RelativeSubmeasure,
};
pub use json::{element_key, functional_from_json, functional_to_json, parse_element_key};
pub(crate) use json::rational_from_json;
pub use lp::{maximize, LpOutcome};

/// Largest atom count for value tables (2^16 entries).
pub const MAX_TABLE_ATOMS: usize = 16;

/// A rational-valued function on every element of a finite algebra.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Functional {
    algebra: FiniteAlgebra,
    values: Vec<Rational>,
}

impl Functional {
    /// `values` is indexed by element bitmask.
    pub fn new(algebra: FiniteAlgebra, values: Vec<Rational>) -> Result<Self> {
        check_table_size(&algebra)?;
        if values.len() as u128 != algebra.size() {
            return Err(Error::Format(format!(
                "expected {} values, got {}",
                algebra.size(),
                values.len()
            )));
        }
        Ok(Functional { algebra, values })
    }

    pub fn from_fn(algebra: FiniteAlgebra, f: impl Fn(Element) -> Rational) -> Result<Self> {
        check_table_size(&algebra)?;
        let values = algebra.elements().map(f).collect();
        Ok(Functional { algebra, values })
    }

    pub fn algebra(&self) -> &FiniteAlgebra {
        &self.algebra
    }

    pub fn value(&self, a: Element) -> &Rational {
        &self.values[a.index()]
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn total(&self) -> &Rational {
        self.value(self.algebra.one())
    }
}

fn check_table_size(algebra: &FiniteAlgebra) -> Result<()> {
    if algebra.n_atoms() > MAX_TABLE_ATOMS {
        return Err(Error::SizeCap(format!(
            "{} atoms exceeds the table cap of {MAX_TABLE_ATOMS}",
            algebra.n_atoms()
        )));
    }
    Ok(())
}

/// A failed axiom instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// The value at 0 is not 0.
    NonzeroAtZero { value: Rational },
    /// `lower ≤ upper` but the value drops.
    Monotonicity { lower: Element, upper: Element },
    /// Disjoint `left`, `right` with value(left ∪ right) > value(left) + value(right).
    Subadditivity { left: Element, right: Element },
}

/// A monotone, subadditive functional vanishing at 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Submeasure(Functional);

impl Submeasure {
    /// Validates a raw table indexed by element bitmask.
    pub fn new(algebra: FiniteAlgebra, values: Vec<Rational>) -> Result<Self> {
        Self::from_functional(Functional::new(algebra, values)?)
    }

    pub fn from_functional(f: Functional) -> Result<Self> {
        if let Some(a) = f.algebra.elements().find(|&a| f.value(a).is_negative()) {
            return Err(Error::Format(format!("negative value at element {}", element_key(a))));
        }
        let violations = violations(&f);
        if violations.is_empty() {
            Ok(Submeasure(f))
        } else {
            Err(Error::NotSubmeasure(violations))
        }
    }

    pub(crate) fn from_values_unchecked(algebra: FiniteAlgebra, values: Vec<Rational>) -> Self {
        debug_assert_eq!(values.len() as u128, algebra.size());
        Submeasure(Functional { algebra, values })
    }

    /// The additive measure with the given atom masses.
    pub fn measure(algebra: FiniteAlgebra, masses: &[Rational]) -> Result<Self> {
        check_table_size(&algebra)?;
        if masses.len() != algebra.n_atoms() {
            return Err(Error::Format(format!(
                "expected {} atom masses, got {}",
                algebra.n_atoms(),
                masses.len()
            )));
        }
        if masses.iter().any(|m| m.is_negative()) {
            return Err(Error::Format("negative atom mass".into()));
        }
        Ok(Submeasure(Functional { algebra, values: additive_table(algebra, masses) }))
    }

    /// Each atom weighs 1/n_atoms.
    pub fn uniform(algebra: FiniteAlgebra) -> Result<Self> {
        let mass = Rational::new(BigInt::one(), BigInt::from(algebra.n_atoms()));
        Self::measure(algebra, &vec![mass; algebra.n_atoms()])
    }

    pub fn algebra(&self) -> &FiniteAlgebra {
        &self.0.algebra
    }

    pub fn value(&self, a: Element) -> &Rational {
        self.0.value(a)
    }

    pub fn values(&self) -> &[Rational] {
        &self.0.values
    }

    pub fn total(&self) -> &Rational {
        self.0.total()
    }

    pub fn is_normalised(&self) -> bool {
        self.total().is_one()
    }

    pub fn as_functional(&self) -> &Functional {
        &self.0
    }

    pub fn into_functional(self) -> Functional {
        self.0
    }
}

/// Table of an additive function from its atom values, by bitmask.
pub(crate) fn additive_table(algebra: FiniteAlgebra, masses: &[Rational]) -> Vec<Rational> {
    let size = algebra.size() as usize;
    let mut values = Vec::with_capacity(size);
    values.push(Rational::zero());
    for mask in 1..size {
        let low = mask.trailing_zeros() as usize;
        let v = &values[mask & (mask - 1)] + &masses[low];
        values.push(v);
    }
    values
}

/// Every violated generating axiom instance: the zero condition, monotonicity
/// along covering pairs a ⋖ a ∪ {atom}, and subadditivity on disjoint pairs.
/// These imply the axioms for all pairs.
pub fn violations(f: &Functional) -> Vec<Violation> {
    let mut out = Vec::new();
    if !f.value(Element::ZERO).is_zero() {
        out.push(Violation::NonzeroAtZero { value: f.value(Element::ZERO).clone() });
    }
    match scaled_integers(f.values()) {
        Some(ints) => collect_violations(f.algebra, &ints, &mut out),
        None => collect_violations(f.algebra, f.values(), &mut out),
    }
    out
}

fn collect_violations<T>(algebra: FiniteAlgebra, v: &[T], out: &mut Vec<Violation>)
where
    T: PartialOrd,
    for<'a> &'a T: std::ops::Add<&'a T, Output = T>,
{
    let one = algebra.one();
    for a in algebra.elements() {
        for i in algebra.complement(a).atoms() {
            let upper = a.join(Element::atom(i));
            if v[a.index()] > v[upper.index()] {
                out.push(Violation::Monotonicity { lower: a, upper });
            }
        }
    }
    for a in algebra.elements().skip(1) {
        let rest = one.difference(a);
        for b in rest.subsets() {
            if b.bits() <= a.bits() {
                continue;
            }
            if v[a.join(b).index()] > &v[a.index()] + &v[b.index()] {
                out.push(Violation::Subadditivity { left: a, right: b });
            }
        }
    }
}

/// The values times their common denominator, when everything fits in i128
/// with headroom for one addition.
fn scaled_integers(values: &[Rational]) -> Option<Vec<i128>> {
    let mut lcm = BigInt::one();
    for v in values {
        lcm = lcm.lcm(v.denom());
    }
    let limit = i128::MAX / 4;
    values
        .iter()
        .map(|v| {
            let scaled = v.numer() * (&lcm / v.denom());
            scaled.to_i128().filter(|x| x.abs() <= limit)
        })
        .collect()
}
