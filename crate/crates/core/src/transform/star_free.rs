//! The algebra 𝒫(𝒫([n])⁺) with its *-free generators, and signed measures on it.

use serde_json::{json, Map, Value};

use crate::algebra::{canonical_elements, BooleanAlgebra, Element, FiniteAlgebra};
use crate::error::{Error, Result};
use crate::rational::{format_rational, Rational};
use crate::submeasure::rational_from_json;

/// Largest generator count for which atoms are indexed.
pub const MAX_GENERATORS: usize = 12;
/// Largest generator count whose elements fit an [`Element`] (2ⁿ − 1 ≤ 64).
pub const MAX_ELEMENT_GENERATORS: usize = 6;

/// Atoms are the nonempty y ⊆ [n], ordered by size then lexicographically;
/// a subset y is a bitmask with bit i−1 for i ∈ y.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StarFreeAlgebra {
    n: usize,
    order: Vec<u64>,
    /// `position[y]` is the atom index of subset y (unused at 0).
    position: Vec<usize>,
}

/// `"1,2"` for the subset {1, 2}.
pub fn subset_key(y: u64) -> String {
    Element::from_bits(y).atoms().map(|i| (i + 1).to_string()).collect::<Vec<_>>().join(",")
}

fn parse_subset_key(key: &str, n: usize) -> Result<u64> {
    let mut y = 0u64;
    for part in key.split(',') {
        let i: usize = part.trim().parse().map_err(|_| Error::Format(format!("bad subset key {key:?}")))?;
        if i == 0 || i > n {
            return Err(Error::Format(format!("index {i} outside [1, {n}] in key {key:?}")));
        }
        y |= 1 << (i - 1);
    }
    Ok(y)
}

impl StarFreeAlgebra {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 || n > MAX_GENERATORS {
            return Err(Error::SizeCap(format!("generator count must lie in [1, {MAX_GENERATORS}]")));
        }
        let order: Vec<u64> = canonical_elements(n).into_iter().map(Element::bits).collect();
        let mut position = vec![usize::MAX; 1 << n];
        for (i, &y) in order.iter().enumerate() {
            position[y as usize] = i;
        }
        Ok(StarFreeAlgebra { n, order, position })
    }

    pub fn generators(&self) -> usize {
        self.n
    }

    pub fn atom_count(&self) -> usize {
        self.order.len()
    }

    /// Subsets y in atom order.
    pub fn atom_subsets(&self) -> &[u64] {
        &self.order
    }

    pub fn atom_index(&self, y: u64) -> usize {
        self.position[y as usize]
    }

    fn check_elements(&self) -> Result<()> {
        if self.n > MAX_ELEMENT_GENERATORS {
            return Err(Error::SizeCap(format!("elements need at most {MAX_ELEMENT_GENERATORS} generators")));
        }
        Ok(())
    }

    pub fn algebra(&self) -> Result<FiniteAlgebra> {
        self.check_elements()?;
        FiniteAlgebra::new(self.atom_count())
    }

    /// The element made of the atoms {y} for y in `subsets`.
    pub fn element_of(&self, subsets: impl IntoIterator<Item = u64>) -> Result<Element> {
        self.check_elements()?;
        Ok(Element::from_atoms(subsets.into_iter().map(|y| self.atom_index(y))))
    }

    /// aᵢ = {y : i ∈ y}, for i ∈ [n].
    pub fn generator(&self, i: usize) -> Result<Element> {
        self.check_elements()?;
        if i == 0 || i > self.n {
            return Err(Error::Range(format!("generator {i} outside [1, {}]", self.n)));
        }
        self.element_of(self.order.iter().copied().filter(|y| y >> (i - 1) & 1 == 1))
    }

    pub fn all_generators(&self) -> Result<Vec<Element>> {
        (1..=self.n).map(|i| self.generator(i)).collect()
    }

    /// ∪_{i∈q} aᵢ = {y : y ∩ q ≠ ∅}.
    pub fn union_of_generators(&self, q: u64) -> Result<Element> {
        self.element_of(self.order.iter().copied().filter(|y| y & q != 0))
    }
}

/// A finitely additive signed measure on 𝒫(𝒫([n])⁺), given by its atom values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignedMeasure {
    algebra: StarFreeAlgebra,
    values: Vec<Rational>,
}

impl SignedMeasure {
    pub fn new(algebra: StarFreeAlgebra, values: Vec<Rational>) -> Result<Self> {
        if values.len() != algebra.atom_count() {
            return Err(Error::Format(format!("expected {} atom values, got {}", algebra.atom_count(), values.len())));
        }
        Ok(SignedMeasure { algebra, values })
    }

    pub fn algebra(&self) -> &StarFreeAlgebra {
        &self.algebra
    }

    /// Atom values in atom order.
    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn atom_value(&self, y: u64) -> &Rational {
        &self.values[self.algebra.atom_index(y)]
    }

    pub fn value(&self, e: Element) -> Rational {
        e.atoms().map(|i| &self.values[i]).sum()
    }

    pub fn is_nonnegative(&self) -> bool {
        self.values.iter().all(|v| *v >= Rational::default())
    }

    pub fn scale(&self, k: &Rational) -> SignedMeasure {
        SignedMeasure { algebra: self.algebra.clone(), values: self.values.iter().map(|v| v * k).collect() }
    }

    pub fn add(&self, other: &SignedMeasure) -> Result<SignedMeasure> {
        if self.algebra != other.algebra {
            return Err(Error::Precondition("measures live on different algebras".into()));
        }
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect();
        Ok(SignedMeasure { algebra: self.algebra.clone(), values })
    }

    /// `{"atoms": {"1": "1/4", ..., "1,2": "1/2"}}` in atom order.
    pub fn to_json(&self) -> Value {
        let atoms: Map<String, Value> = self
            .algebra
            .atom_subsets()
            .iter()
            .zip(&self.values)
            .map(|(&y, v)| (subset_key(y), Value::String(format_rational(v))))
            .collect();
        json!({ "atoms": atoms })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let atoms = v
            .get("atoms")
            .and_then(Value::as_object)
            .ok_or_else(|| Error::Format("missing object field \"atoms\"".into()))?;
        // 2ⁿ − 1 entries
        let n = (atoms.len() + 1).trailing_zeros() as usize;
        if (1usize << n) != atoms.len() + 1 {
            return Err(Error::Format("a signed measure needs 2^n - 1 atom values".into()));
        }
        let algebra = StarFreeAlgebra::new(n)?;
        let mut values: Vec<Option<Rational>> = vec![None; algebra.atom_count()];
        for (key, val) in atoms {
            let y = parse_subset_key(key, n)?;
            values[algebra.atom_index(y)] = Some(rational_from_json(val)?);
        }
        let values = values
            .into_iter()
            .map(|v| v.ok_or_else(|| Error::Format("duplicate or missing atom".into())))
            .collect::<Result<Vec<_>>>()?;
        SignedMeasure::new(algebra, values)
    }
}

/// Outcome of a *-freeness check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StarFreeVerdict {
    Free,
    /// (∩_{j∈J} a_j) ∩ (∩_{j∉J} a_jᶜ) = 0 for this J (1-based, sorted).
    EmptyPattern(Vec<usize>),
    /// The elements do not cover 1.
    NotCovering,
}

/// Checks every nonempty J in lexicographic order of sorted lists, then the
/// covering condition.
pub fn star_free_check<B: BooleanAlgebra>(algebra: &B, elements: &[B::Elem]) -> StarFreeVerdict {
    let n = elements.len();
    let complements: Vec<B::Elem> = elements.iter().map(|a| algebra.complement(a)).collect();
    // depth-first over sorted lists gives lexicographic order: {1}, {1,2}, {1,2,3}, {1,3}, {2}, ...
    fn visit<B: BooleanAlgebra>(
        algebra: &B,
        elements: &[B::Elem],
        complements: &[B::Elem],
        chosen: &mut Vec<usize>,
        next: usize,
    ) -> Option<Vec<usize>> {
        for j in next..elements.len() {
            chosen.push(j);
            let mut meet = algebra.one();
            for i in 0..elements.len() {
                let part = if chosen.contains(&i) { &elements[i] } else { &complements[i] };
                meet = algebra.meet(&meet, part);
            }
            if algebra.is_zero(&meet) {
                return Some(chosen.iter().map(|i| i + 1).collect());
            }
            if let Some(found) = visit(algebra, elements, complements, chosen, j + 1) {
                return Some(found);
            }
            chosen.pop();
        }
        None
    }
    if let Some(j) = visit(algebra, elements, &complements, &mut Vec::with_capacity(n), 0) {
        return StarFreeVerdict::EmptyPattern(j);
    }
    let union = elements.iter().fold(algebra.zero(), |u, a| algebra.join(&u, a));
    if union != algebra.one() {
        return StarFreeVerdict::NotCovering;
    }
    StarFreeVerdict::Free
}
