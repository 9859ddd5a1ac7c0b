use crate::error::{Error, Result};

/// Largest atom count an [`Element`] bitmask can represent.
pub const MAX_ATOMS: usize = 64;

/// Operations shared by concretely presented Boolean algebras.
pub trait BooleanAlgebra {
    type Elem: Clone + PartialEq;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn meet(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn join(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn complement(&self, a: &Self::Elem) -> Self::Elem;

    fn is_zero(&self, a: &Self::Elem) -> bool {
        *a == self.zero()
    }
}

/// An element of a finite algebra: a set of atom indices (0-based bitmask).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Element(u64);

impl Element {
    pub const ZERO: Element = Element(0);

    pub fn from_bits(bits: u64) -> Self {
        Element(bits)
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    /// Bitmask as a table index.
    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn atom(i: usize) -> Self {
        assert!(i < MAX_ATOMS, "atom index {i} out of range");
        Element(1 << i)
    }

    pub fn from_atoms<I: IntoIterator<Item = usize>>(atoms: I) -> Self {
        atoms.into_iter().fold(Element::ZERO, |acc, i| acc.join(Element::atom(i)))
    }

    pub fn atoms(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                return None;
            }
            let i = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            Some(i)
        })
    }

    pub fn count(self) -> u32 {
        self.0.count_ones()
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    pub fn meet(self, other: Self) -> Self {
        Element(self.0 & other.0)
    }

    pub fn join(self, other: Self) -> Self {
        Element(self.0 | other.0)
    }

    pub fn difference(self, other: Self) -> Self {
        Element(self.0 & !other.0)
    }

    pub fn below(self, other: Self) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_disjoint(self, other: Self) -> bool {
        self.0 & other.0 == 0
    }

    /// Lowest atom index, if any.
    pub fn first_atom(self) -> Option<usize> {
        (self.0 != 0).then(|| self.0.trailing_zeros() as usize)
    }

    /// All elements below `self`, in increasing bitmask order.
    pub fn subsets(self) -> impl Iterator<Item = Element> {
        let full = self.0;
        let mut next = Some(0u64);
        std::iter::from_fn(move || {
            let cur = next?;
            next = if cur == full { None } else { Some((cur.wrapping_sub(full)) & full) };
            Some(Element(cur))
        })
    }
}

/// The finite Boolean algebra with `n_atoms` atoms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FiniteAlgebra {
    n_atoms: usize,
}

impl FiniteAlgebra {
    pub fn new(n_atoms: usize) -> Result<Self> {
        if n_atoms == 0 {
            return Err(Error::Range("an algebra needs at least one atom".into()));
        }
        if n_atoms > MAX_ATOMS {
            return Err(Error::SizeCap(format!("{n_atoms} atoms exceeds the cap of {MAX_ATOMS}")));
        }
        Ok(FiniteAlgebra { n_atoms })
    }

    pub fn n_atoms(&self) -> usize {
        self.n_atoms
    }

    /// Number of elements, 2^n_atoms.
    pub fn size(&self) -> u128 {
        1u128 << self.n_atoms
    }

    pub fn one(&self) -> Element {
        if self.n_atoms == 64 {
            Element(u64::MAX)
        } else {
            Element((1u64 << self.n_atoms) - 1)
        }
    }

    pub fn complement(&self, a: Element) -> Element {
        self.one().difference(a)
    }

    pub fn contains(&self, a: Element) -> bool {
        a.below(self.one())
    }

    pub fn atoms(&self) -> impl Iterator<Item = Element> {
        (0..self.n_atoms).map(Element::atom)
    }

    /// Every element in increasing bitmask order.
    pub fn elements(&self) -> impl Iterator<Item = Element> {
        self.one().subsets()
    }
}

impl BooleanAlgebra for FiniteAlgebra {
    type Elem = Element;

    fn zero(&self) -> Element {
        Element::ZERO
    }
    fn one(&self) -> Element {
        FiniteAlgebra::one(self)
    }
    fn meet(&self, a: &Element, b: &Element) -> Element {
        a.meet(*b)
    }
    fn join(&self, a: &Element, b: &Element) -> Element {
        a.join(*b)
    }
    fn complement(&self, a: &Element) -> Element {
        FiniteAlgebra::complement(self, *a)
    }
}

/// Nonzero elements of an `n_atoms`-atom algebra ordered by size, then
/// lexicographically by their sorted atom lists.
pub fn canonical_elements(n_atoms: usize) -> Vec<Element> {
    assert!(n_atoms < 32, "canonical enumeration is for small algebras");
    let mut all: Vec<Element> = (1u64..1 << n_atoms).map(Element::from_bits).collect();
    all.sort_by_cached_key(|e| (e.count(), e.atoms().collect::<Vec<_>>()));
    all
}

/// Atoms of the subalgebra generated by `elements`, ordered by lowest atom.
pub fn generate_subalgebra(algebra: &FiniteAlgebra, elements: &[Element]) -> Vec<Element> {
    let mut blocks = vec![algebra.one()];
    for &e in elements {
        let e = e.meet(algebra.one());
        blocks = blocks
            .into_iter()
            .flat_map(|b| [b.meet(e), b.difference(e)])
            .filter(|b| !b.is_zero())
            .collect();
    }
    blocks.sort_by_key(|b| b.first_atom());
    blocks
}

/// A subalgebra of a finite algebra, given by its atoms (a partition of 1).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subalgebra {
    ambient: FiniteAlgebra,
    blocks: Vec<Element>,
}

impl Subalgebra {
    /// Blocks must be nonzero, pairwise disjoint and cover 1. Their order is kept.
    pub fn new(ambient: FiniteAlgebra, blocks: Vec<Element>) -> Result<Self> {
        let mut seen = Element::ZERO;
        for &b in &blocks {
            if b.is_zero() {
                return Err(Error::Precondition("partition block is zero".into()));
            }
            if !ambient.contains(b) {
                return Err(Error::Precondition("partition block outside the algebra".into()));
            }
            if !b.is_disjoint(seen) {
                return Err(Error::Precondition("partition blocks overlap".into()));
            }
            seen = seen.join(b);
        }
        if seen != ambient.one() {
            return Err(Error::Precondition("partition blocks do not cover 1".into()));
        }
        Ok(Subalgebra { ambient, blocks })
    }

    pub fn discrete(ambient: FiniteAlgebra) -> Self {
        Subalgebra { blocks: ambient.atoms().collect(), ambient }
    }

    pub fn generated(ambient: FiniteAlgebra, elements: &[Element]) -> Self {
        Subalgebra { blocks: generate_subalgebra(&ambient, elements), ambient }
    }

    pub fn ambient(&self) -> &FiniteAlgebra {
        &self.ambient
    }

    pub fn blocks(&self) -> &[Element] {
        &self.blocks
    }

    /// The subalgebra as an abstract algebra with one atom per block.
    pub fn local_algebra(&self) -> FiniteAlgebra {
        FiniteAlgebra { n_atoms: self.blocks.len() }
    }

    /// Ambient element for a local element (a set of block indices).
    pub fn embed(&self, local: Element) -> Element {
        local.atoms().fold(Element::ZERO, |acc, i| acc.join(self.blocks[i]))
    }

    /// Local element whose union of blocks is `e`, if `e` belongs to the subalgebra.
    pub fn locate(&self, e: Element) -> Option<Element> {
        let hull = self.hull(e);
        (self.embed(hull) == e).then_some(hull)
    }

    /// Local element made of all blocks meeting `e`: the least member above `e`.
    pub fn hull(&self, e: Element) -> Element {
        let mut local = Element::ZERO;
        for (i, b) in self.blocks.iter().enumerate() {
            if !b.is_disjoint(e) {
                local = local.join(Element::atom(i));
            }
        }
        local
    }

    pub fn contains(&self, e: Element) -> bool {
        self.locate(e).is_some()
    }

    /// True when every block of `coarse` is a union of blocks of `self`.
    pub fn refines(&self, coarse: &Subalgebra) -> bool {
        self.ambient == coarse.ambient && coarse.blocks.iter().all(|&b| self.contains(b))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn el(atoms: &[usize]) -> Element {
        Element::from_atoms(atoms.iter().map(|a| a - 1))
    }

    #[test]
    fn canonical_order_is_size_then_lex() {
        let order = canonical_elements(3);
        let lists: Vec<Vec<usize>> = order.iter().map(|e| e.atoms().map(|i| i + 1).collect()).collect();
        assert_eq!(
            lists,
            vec![vec![1], vec![2], vec![3], vec![1, 2], vec![1, 3], vec![2, 3], vec![1, 2, 3]]
        );
    }

    #[test]
    fn empty_input_gives_trivial_algebra() {
        let alg = FiniteAlgebra::new(3).unwrap();
        assert_eq!(generate_subalgebra(&alg, &[]), vec![alg.one()]);
    }

    #[test]
    fn single_element_splits_in_two() {
        let alg = FiniteAlgebra::new(4).unwrap();
        let a = el(&[1, 3]);
        assert_eq!(generate_subalgebra(&alg, &[a]), vec![a, alg.complement(a)]);
    }

    #[test]
    fn overlapping_pair_generates_discrete_algebra() {
        let alg = FiniteAlgebra::new(4).unwrap();
        let atoms = generate_subalgebra(&alg, &[el(&[1, 2]), el(&[2, 3])]);
        assert_eq!(atoms, vec![el(&[1]), el(&[2]), el(&[3]), el(&[4])]);
    }

    #[test]
    fn generated_atoms_match_brute_force_closure() {
        let alg = FiniteAlgebra::new(5).unwrap();
        let gens = [el(&[1, 2, 5]), el(&[2, 3]), el(&[5])];
        let mut closure = std::collections::BTreeSet::from([Element::ZERO, alg.one()]);
        closure.extend(gens);
        loop {
            let current: Vec<_> = closure.iter().copied().collect();
            let before = closure.len();
            for &a in &current {
                closure.insert(alg.complement(a));
                for &b in &current {
                    closure.insert(a.meet(b));
                    closure.insert(a.join(b));
                }
            }
            if closure.len() == before {
                break;
            }
        }
        let atoms: Vec<_> = closure
            .iter()
            .copied()
            .filter(|&a| !a.is_zero() && closure.iter().all(|&b| b.is_zero() || !b.below(a) || b == a))
            .collect();
        let mut got = generate_subalgebra(&alg, &gens);
        got.sort();
        let mut want = atoms;
        want.sort();
        assert_eq!(got, want);
    }

    #[test]
    fn subsets_enumerates_all_below() {
        let e = el(&[1, 3, 4]);
        let subs: Vec<_> = e.subsets().collect();
        assert_eq!(subs.len(), 8);
        assert!(subs.iter().all(|s| s.below(e)));
        assert!(subs.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn subalgebra_hull_and_locate() {
        let alg = FiniteAlgebra::new(4).unwrap();
        let sub = Subalgebra::new(alg, vec![el(&[1, 2]), el(&[3]), el(&[4])]).unwrap();
        assert_eq!(sub.hull(el(&[2, 3])), Element::from_bits(0b011));
        assert_eq!(sub.locate(el(&[1, 2, 4])), Some(Element::from_bits(0b101)));
        assert_eq!(sub.locate(el(&[1])), None);
        assert!(Subalgebra::discrete(alg).refines(&sub));
        assert!(!sub.refines(&Subalgebra::discrete(alg)));
    }

    #[test]
    fn rejects_bad_partitions() {
        let alg = FiniteAlgebra::new(3).unwrap();
        assert!(Subalgebra::new(alg, vec![el(&[1, 2]), el(&[2, 3])]).is_err());
        assert!(Subalgebra::new(alg, vec![el(&[1, 2])]).is_err());
        assert!(Subalgebra::new(alg, vec![el(&[1, 2, 3]), Element::ZERO]).is_err());
    }
}
