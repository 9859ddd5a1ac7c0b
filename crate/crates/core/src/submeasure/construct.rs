use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::Submeasure;
use crate::algebra::{Element, FiniteAlgebra, Subalgebra};
use crate::error::{Error, Result};
use crate::rational::Rational;

/// A submeasure on a subalgebra of a larger finite algebra.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelativeSubmeasure {
    domain: Subalgebra,
    submeasure: Submeasure,
}

impl RelativeSubmeasure {
    /// `submeasure` lives on the local algebra of `domain` (one atom per block).
    pub fn new(domain: Subalgebra, submeasure: Submeasure) -> Result<Self> {
        if submeasure.algebra().n_atoms() != domain.blocks().len() {
            return Err(Error::Precondition(format!(
                "submeasure has {} atoms but the subalgebra has {} blocks",
                submeasure.algebra().n_atoms(),
                domain.blocks().len()
            )));
        }
        Ok(RelativeSubmeasure { domain, submeasure })
    }

    /// A submeasure on a whole algebra, viewed relative to itself.
    pub fn whole(submeasure: Submeasure) -> Self {
        RelativeSubmeasure { domain: Subalgebra::discrete(*submeasure.algebra()), submeasure }
    }

    pub fn domain(&self) -> &Subalgebra {
        &self.domain
    }

    pub fn submeasure(&self) -> &Submeasure {
        &self.submeasure
    }

    /// Value at an ambient element belonging to the domain.
    pub fn value(&self, ambient: Element) -> Option<&Rational> {
        self.domain.locate(ambient).map(|local| self.submeasure.value(local))
    }
}

/// Extends λ to ⟨dom(λ) ∪ {c}⟩ by λ₁(b) = min{ λ(d) : d ∈ dom(λ), b ≤ d }.
pub fn extend_min_cover(lambda: &RelativeSubmeasure, c: Element) -> Result<RelativeSubmeasure> {
    let old = &lambda.domain;
    let ambient = *old.ambient();
    if !ambient.contains(c) {
        return Err(Error::Precondition("new element lies outside the ambient algebra".into()));
    }
    let mut blocks: Vec<Element> = old
        .blocks()
        .iter()
        .flat_map(|&b| [b.meet(c), b.difference(c)])
        .filter(|b| !b.is_zero())
        .collect();
    blocks.sort_by_key(|b| b.first_atom());
    let domain = Subalgebra::new(ambient, blocks)?;
    let local = domain.local_algebra();
    // λ is monotone, so the least superelement in dom(λ) attains the minimum
    let values = local
        .elements()
        .map(|b| lambda.submeasure.value(old.hull(domain.embed(b))).clone())
        .collect();
    Ok(RelativeSubmeasure { domain, submeasure: Submeasure::from_values_unchecked(local, values) })
}

/// A submeasure on a refined algebra together with the coarse atoms it refines.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Refinement {
    pub submeasure: Submeasure,
    /// Coarse atoms b₁…b_k as elements of the refined algebra.
    pub parents: Subalgebra,
    pieces: usize,
}

impl Refinement {
    /// Piece j (0-based) of parent atom i (0-based).
    pub fn piece(&self, i: usize, j: usize) -> Element {
        Element::atom(i * self.pieces + j)
    }

    /// The cross-section ∪ᵢ bᵢˡ (0-based l).
    pub fn cross_section(&self, l: usize) -> Element {
        (0..self.parents.blocks().len()).fold(Element::ZERO, |acc, i| acc.join(self.piece(i, l)))
    }
}

/// Splits every atom of dom(p) into `n` pieces and sets q(a) = p(least
/// element of dom(p) above a). The cross-sections are n disjoint elements of value 1.
pub fn pathological_refinement(p: &Submeasure, n: usize) -> Result<Refinement> {
    if n < 2 {
        return Err(Error::Range("refinement needs n ≥ 2".into()));
    }
    if !p.is_normalised() {
        return Err(Error::Precondition("p must be normalised".into()));
    }
    let k = p.algebra().n_atoms();
    let fine = FiniteAlgebra::new(k * n)?;
    let blocks = (0..k)
        .map(|i| Element::from_atoms(i * n..(i + 1) * n))
        .collect();
    let parents = Subalgebra::new(fine, blocks)?;
    super::check_table_size(&fine)?;
    let values = fine.elements().map(|a| p.value(parents.hull(a)).clone()).collect();
    Ok(Refinement { submeasure: Submeasure::from_values_unchecked(fine, values), parents, pieces: n })
}

/// Re-indexes the part of `a` inside `block` onto the block's own atoms.
fn compress(a: Element, block: Element) -> Element {
    let mut out = 0u64;
    for (j, i) in block.atoms().enumerate() {
        if a.meet(Element::atom(i)) != Element::ZERO {
            out |= 1 << j;
        }
    }
    Element::from_bits(out)
}

/// Glues normalised φᵢ on the blocks aᵢ of `partition` using μ on the blocks:
/// φ(a) is the least total of a cover of `a` by one element of ⟨a₀…aₙ⟩
/// (valued by μ) and pieces inside single blocks (valued μ(aᵢ)·φᵢ).
pub fn amalgamate(mu: &Submeasure, partition: &Subalgebra, parts: &[Submeasure]) -> Result<Submeasure> {
    let blocks = partition.blocks();
    if mu.algebra().n_atoms() != blocks.len() {
        return Err(Error::Precondition(format!(
            "μ has {} atoms but the partition has {} blocks",
            mu.algebra().n_atoms(),
            blocks.len()
        )));
    }
    if parts.len() != blocks.len() {
        return Err(Error::Precondition("one part per partition block is required".into()));
    }
    for (i, (part, block)) in parts.iter().zip(blocks).enumerate() {
        if part.algebra().n_atoms() != block.count() as usize {
            return Err(Error::Precondition(format!(
                "part {i} has {} atoms but its block has {}",
                part.algebra().n_atoms(),
                block.count()
            )));
        }
        if !part.is_normalised() {
            return Err(Error::Precondition(format!("part {i} is not normalised")));
        }
    }
    let fine = *partition.ambient();
    super::check_table_size(&fine)?;
    let block_mass: Vec<&Rational> = (0..blocks.len()).map(|i| mu.value(Element::atom(i))).collect();
    let mut values = Vec::with_capacity(fine.size() as usize);
    for a in fine.elements() {
        let hull = partition.hull(a);
        // cost of covering a ∩ aᵢ inside block i alone
        let piece_cost: Vec<Rational> = (0..blocks.len())
            .map(|i| {
                if hull.meet(Element::atom(i)).is_zero() {
                    Rational::zero()
                } else {
                    block_mass[i] * parts[i].value(compress(a, blocks[i]))
                }
            })
            .collect();
        let all_pieces: Rational = piece_cost.iter().sum();
        let mut best = all_pieces.clone();
        for k in hull.subsets().skip(1) {
            let saved: Rational = k.atoms().map(|i| &piece_cost[i]).sum();
            let cost = mu.value(k) + (&all_pieces - saved);
            if cost < best {
                best = cost;
            }
        }
        values.push(best);
    }
    Ok(Submeasure::from_values_unchecked(fine, values))
}

/// Amalgamation with uniform measures on every block: a finite stage of an
/// exhaustive extension of p.
pub fn exhaustive_stage_extension(p: &Submeasure, target: &Subalgebra) -> Result<Submeasure> {
    if target.blocks().len() != p.algebra().n_atoms() {
        return Err(Error::Precondition(format!(
            "target must refine the {} atoms of dom(p), got {} blocks",
            p.algebra().n_atoms(),
            target.blocks().len()
        )));
    }
    let parts = target
        .blocks()
        .iter()
        .map(|b| {
            let alg = FiniteAlgebra::new(b.count() as usize)?;
            let mass = Rational::new(BigInt::one(), BigInt::from(b.count()));
            Submeasure::measure(alg, &vec![mass; alg.n_atoms()])
        })
        .collect::<Result<Vec<_>>>()?;
    amalgamate(p, target, &parts)
}
