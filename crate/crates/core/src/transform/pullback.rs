//! Submeasures μ = λ ∘ f for a union-preserving f and a nonnegative measure λ.

use fixedbitset::FixedBitSet;

use crate::algebra::{Element, FiniteAlgebra};
use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::submeasure::{Functional, Submeasure};

/// A map from a finite algebra into the subsets of a finite set, fixed by atom
/// images and extended by unions, so f(0) = 0 and f(a ∪ b) = f(a) ∪ f(b).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnionMap {
    source: FiniteAlgebra,
    target_atoms: usize,
    images: Vec<FixedBitSet>,
}

impl UnionMap {
    pub fn new(source: FiniteAlgebra, target_atoms: usize, images: Vec<FixedBitSet>) -> Result<Self> {
        if images.len() != source.n_atoms() {
            return Err(Error::Format(format!("expected {} atom images, got {}", source.n_atoms(), images.len())));
        }
        if images.iter().any(|im| im.len() > target_atoms && im.ones().any(|i| i >= target_atoms)) {
            return Err(Error::Range(format!("an atom image leaves the {target_atoms} target atoms")));
        }
        let images = images
            .into_iter()
            .map(|mut im| {
                im.grow(target_atoms);
                im
            })
            .collect();
        Ok(UnionMap { source, target_atoms, images })
    }

    pub fn identity(source: FiniteAlgebra) -> Self {
        let n = source.n_atoms();
        let images = (0..n)
            .map(|i| {
                let mut b = FixedBitSet::with_capacity(n);
                b.insert(i);
                b
            })
            .collect();
        UnionMap { source, target_atoms: n, images }
    }

    /// Atom i ↦ aᵢ₊₁ = {y : i + 1 ∈ y} inside 𝒫(𝒫([n])⁺), atoms in size-then-lex order.
    pub fn good_map(n: usize) -> Result<Self> {
        let star = super::star_free::StarFreeAlgebra::new(n)?;
        let images = (0..n)
            .map(|i| {
                let mut b = FixedBitSet::with_capacity(star.atom_count());
                for (k, &y) in star.atom_subsets().iter().enumerate() {
                    if y >> i & 1 == 1 {
                        b.insert(k);
                    }
                }
                b
            })
            .collect();
        UnionMap::new(FiniteAlgebra::new(n)?, star.atom_count(), images)
    }

    pub fn source(&self) -> &FiniteAlgebra {
        &self.source
    }

    pub fn target_atoms(&self) -> usize {
        self.target_atoms
    }

    pub fn images(&self) -> &[FixedBitSet] {
        &self.images
    }

    pub fn apply(&self, a: Element) -> FixedBitSet {
        let mut out = FixedBitSet::with_capacity(self.target_atoms);
        for i in a.atoms() {
            out.union_with(&self.images[i]);
        }
        out
    }
}

/// μ(a) = λ(f(a)) with λ given by its target atom values.
pub fn pullback_submeasure(lambda: &[Rational], f: &UnionMap) -> Result<Submeasure> {
    if lambda.len() != f.target_atoms {
        return Err(Error::Format(format!("expected {} measure values, got {}", f.target_atoms, lambda.len())));
    }
    if let Some(i) = lambda.iter().position(|v| *v < Rational::default()) {
        return Err(Error::Precondition(format!("the measure is negative on target atom {}", i + 1)));
    }
    let functional = Functional::from_fn(f.source, |a| f.apply(a).ones().map(|i| &lambda[i]).sum())?;
    Submeasure::from_functional(functional)
}
