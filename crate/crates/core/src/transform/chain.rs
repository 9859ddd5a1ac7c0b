//! Good maps from a chain of finite algebras into 𝒫(𝒫([n])⁺), the induced
//! embeddings between those algebras, and the coherence of the solved measures.

use fixedbitset::FixedBitSet;
use num_traits::Zero;

use super::solve::{solve_signed_measure, MAX_SOLVE_N};
use super::star_free::{SignedMeasure, StarFreeAlgebra};
use crate::algebra::{Element, Subalgebra};
use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::submeasure::Functional;

/// Sends block j of a partition to the generator a_{j+1}.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GoodMap {
    partition: Subalgebra,
    target: StarFreeAlgebra,
}

impl GoodMap {
    pub fn new(partition: Subalgebra) -> Result<Self> {
        let target = StarFreeAlgebra::new(partition.blocks().len())?;
        Ok(GoodMap { partition, target })
    }

    pub fn partition(&self) -> &Subalgebra {
        &self.partition
    }

    pub fn target(&self) -> &StarFreeAlgebra {
        &self.target
    }

    /// Bitmask q of the generators whose union is f(a); `a` must lie in the subalgebra.
    pub fn generator_mask(&self, a: Element) -> Result<u64> {
        let local = self
            .partition
            .locate(a)
            .ok_or_else(|| Error::Precondition("element is not a union of partition blocks".into()))?;
        Ok(local.bits())
    }

    /// f(a) as a set of atom indices of the target: {y : y ∩ q ≠ ∅}.
    pub fn apply(&self, a: Element) -> Result<FixedBitSet> {
        let q = self.generator_mask(a)?;
        Ok(atoms_meeting(&self.target, q))
    }
}

fn atoms_meeting(algebra: &StarFreeAlgebra, q: u64) -> FixedBitSet {
    let mut out = FixedBitSet::with_capacity(algebra.atom_count());
    for (i, &y) in algebra.atom_subsets().iter().enumerate() {
        if y & q != 0 {
            out.insert(i);
        }
    }
    out
}

fn measure_of(lambda: &SignedMeasure, atoms: &FixedBitSet) -> Rational {
    atoms.ones().map(|i| &lambda.values()[i]).sum()
}

/// The monomorphism 𝒫(𝒫([m])⁺) → 𝒫(𝒫([n])⁺) extending aₚ ↦ ∪_{k∈Sₚ} b_k,
/// where the blocks Sₚ partition [n].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Embedding {
    source: StarFreeAlgebra,
    target: StarFreeAlgebra,
    blocks: Vec<u64>,
}

impl Embedding {
    pub fn new(blocks: Vec<u64>, target_generators: usize) -> Result<Self> {
        let mut seen = 0u64;
        for &b in &blocks {
            if b == 0 || b & seen != 0 || b >> target_generators != 0 {
                return Err(Error::Precondition("generator blocks must partition the target generators".into()));
            }
            seen |= b;
        }
        if seen.count_ones() as usize != target_generators {
            return Err(Error::Precondition("generator blocks must partition the target generators".into()));
        }
        Ok(Embedding {
            source: StarFreeAlgebra::new(blocks.len())?,
            target: StarFreeAlgebra::new(target_generators)?,
            blocks,
        })
    }

    pub fn source(&self) -> &StarFreeAlgebra {
        &self.source
    }

    pub fn target(&self) -> &StarFreeAlgebra {
        &self.target
    }

    /// Sₚ as bitmasks over the target generators, p in source order.
    pub fn blocks(&self) -> &[u64] {
        &self.blocks
    }

    /// The source atom {y} whose image contains target atom {z}: y = {p : z ∩ Sₚ ≠ ∅}.
    pub fn project(&self, z: u64) -> u64 {
        self.blocks.iter().enumerate().filter(|(_, &b)| b & z != 0).fold(0, |y, (p, _)| y | 1 << p)
    }

    /// Image of {y}: ∩_{p∈y} cₚ ∩ ∩_{p∉y} cₚᶜ with cₚ = ∪_{k∈Sₚ} b_k.
    pub fn atom_image(&self, y: u64) -> Vec<u64> {
        self.target.atom_subsets().iter().copied().filter(|&z| self.project(z) == y).collect()
    }

    /// Image of a set of source atom indices, as target atom indices.
    pub fn apply(&self, element: &FixedBitSet) -> FixedBitSet {
        let mut out = FixedBitSet::with_capacity(self.target.atom_count());
        for (i, &z) in self.target.atom_subsets().iter().enumerate() {
            if element.contains(self.source.atom_index(self.project(z))) {
                out.insert(i);
            }
        }
        out
    }

    /// `next ∘ self`.
    pub fn then(&self, next: &Embedding) -> Result<Embedding> {
        if self.target != next.source {
            return Err(Error::Precondition("embeddings do not compose".into()));
        }
        let blocks = self
            .blocks
            .iter()
            .map(|&s| next.blocks.iter().enumerate().filter(|(k, _)| s >> k & 1 == 1).fold(0, |acc, (_, &b)| acc | b))
            .collect();
        Embedding::new(blocks, next.target.generators())
    }
}

/// One algebra of the chain with its good map and solved measure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainLevel {
    pub good_map: GoodMap,
    pub measure: SignedMeasure,
}

/// λᵢ for each algebra of a chain together with the embeddings between consecutive levels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransformChain {
    pub levels: Vec<ChainLevel>,
    /// `embeddings[i]` maps level i into level i + 1.
    pub embeddings: Vec<Embedding>,
}

/// Counts from a successful coherence check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CoherenceReport {
    /// Elements a of some 𝔄ᵢ with λᵢ(fᵢ(a)) = μ(a) confirmed.
    pub round_trips: usize,
    /// Pairs i < j whose embedding was checked against both good maps and both measures.
    pub pairs: usize,
}

/// Solves λᵢ on every algebra of `chain` (coarsest first) for the restriction of `mu`.
pub fn transform_functional(mu: &Functional, chain: &[Subalgebra]) -> Result<TransformChain> {
    if chain.is_empty() {
        return Err(Error::Precondition("the chain is empty".into()));
    }
    if !mu.value(Element::ZERO).is_zero() {
        return Err(Error::Precondition("the functional must vanish at 0".into()));
    }
    for (i, a) in chain.iter().enumerate() {
        if a.ambient() != mu.algebra() {
            return Err(Error::Precondition(format!("algebra {} lives in a different ambient algebra", i + 1)));
        }
        if a.blocks().len() > MAX_SOLVE_N {
            return Err(Error::SizeCap(format!("algebra {} has more than {MAX_SOLVE_N} atoms", i + 1)));
        }
    }
    for (i, w) in chain.windows(2).enumerate() {
        if !w[1].refines(&w[0]) {
            return Err(Error::Precondition(format!("algebra {} does not contain algebra {}", i + 2, i + 1)));
        }
        if w[1].blocks().len() <= w[0].blocks().len() {
            return Err(Error::Precondition(format!("atom counts must increase strictly at algebra {}", i + 2)));
        }
    }
    let mut levels = Vec::with_capacity(chain.len());
    for a in chain {
        let good_map = GoodMap::new(a.clone())?;
        let star = good_map.target().clone();
        let values: Vec<Rational> =
            star.atom_subsets().iter().map(|&q| mu.value(a.embed(Element::from_bits(q))).clone()).collect();
        let measure = solve_signed_measure(star.generators(), &values)?;
        levels.push(ChainLevel { good_map, measure });
    }
    let embeddings = chain
        .windows(2)
        .map(|w| {
            // block p of the coarse algebra is the union of fine blocks S_p
            let blocks = w[0]
                .blocks()
                .iter()
                .map(|&b| w[1].locate(b).map(Element::bits).expect("refinement was checked"))
                .collect();
            Embedding::new(blocks, w[1].blocks().len())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TransformChain { levels, embeddings })
}

impl TransformChain {
    /// The embedding from level i into level j (i ≤ j), by composition.
    pub fn embedding(&self, i: usize, j: usize) -> Result<Embedding> {
        if i > j || j >= self.levels.len() {
            return Err(Error::Range(format!("no embedding from level {i} to level {j}")));
        }
        let n = self.levels[i].good_map.target().generators();
        let mut e = Embedding::new((0..n).map(|p| 1u64 << p).collect(), n)?;
        for step in &self.embeddings[i..j] {
            e = e.then(step)?;
        }
        Ok(e)
    }

    /// Re-verifies every coherence equation exactly; the first failure is a
    /// `Precondition` error naming it.
    pub fn check(&self, mu: &Functional) -> Result<CoherenceReport> {
        let mut round_trips = 0;
        for (i, level) in self.levels.iter().enumerate() {
            let local = level.good_map.partition();
            for a in local.local_algebra().elements() {
                let a = local.embed(a);
                let image = level.good_map.apply(a)?;
                if measure_of(&level.measure, &image) != *mu.value(a) {
                    return Err(Error::Precondition(format!("round trip fails at level {} on {a:?}", i + 1)));
                }
                round_trips += 1;
            }
        }
        let mut pairs = 0;
        for i in 0..self.levels.len() {
            for j in i + 1..self.levels.len() {
                let e = self.embedding(i, j)?;
                let (lo, hi) = (&self.levels[i], &self.levels[j]);
                // f_j on the blocks of 𝔄ᵢ agrees with F ∘ fᵢ
                for &b in lo.good_map.partition().blocks() {
                    if hi.good_map.apply(b)? != e.apply(&lo.good_map.apply(b)?) {
                        return Err(Error::Precondition(format!("good maps disagree between levels {} and {}", i + 1, j + 1)));
                    }
                }
                // λ_j ∘ F = λᵢ on atoms, hence everywhere
                for (k, &y) in e.source().atom_subsets().iter().enumerate() {
                    let image: Rational = e.atom_image(y).iter().map(|&z| hi.measure.atom_value(z)).sum();
                    if image != lo.measure.values()[k] {
                        return Err(Error::Precondition(format!("measures disagree between levels {} and {}", i + 1, j + 1)));
                    }
                }
                pairs += 1;
            }
        }
        Ok(CoherenceReport { round_trips, pairs })
    }
}
