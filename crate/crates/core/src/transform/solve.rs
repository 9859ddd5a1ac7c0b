//! The unique signed measure λ on 𝒫(𝒫([n])⁺) with λ(∪_{i∈q} aᵢ) = μ(q).

use num_traits::Zero;

use super::matrix::{incidence_matrix_in_order, solve_exact};
use super::star_free::{SignedMeasure, StarFreeAlgebra};
use crate::algebra::{Element, FiniteAlgebra};
use crate::error::{Error, Result};
use crate::rational::{rat, Rational};
use crate::submeasure::{Functional, Submeasure};

/// Largest generator count the dense solver accepts.
pub const MAX_SOLVE_N: usize = 9;

/// Solves Σ_{y∩q≠∅} X_y = μ(q) for all nonempty q. `mu` lists μ(q) with q in
/// atom order (size, then lexicographic).
pub fn solve_signed_measure(n: usize, mu: &[Rational]) -> Result<SignedMeasure> {
    if n > MAX_SOLVE_N {
        return Err(Error::SizeCap(format!("the solver handles at most {MAX_SOLVE_N} generators")));
    }
    let algebra = StarFreeAlgebra::new(n)?;
    if mu.len() != algebra.atom_count() {
        return Err(Error::Format(format!("expected {} values, got {}", algebra.atom_count(), mu.len())));
    }
    let matrix = incidence_matrix_in_order(algebra.atom_subsets());
    let x = solve_exact(&matrix, mu)?;
    SignedMeasure::new(algebra, x)
}

/// λ for a functional on an n-atom algebra, pairing atom i with generator aᵢ.
pub fn solve_for_functional(f: &Functional) -> Result<SignedMeasure> {
    if !f.value(Element::ZERO).is_zero() {
        return Err(Error::Precondition("the functional must vanish at 0".into()));
    }
    let n = f.algebra().n_atoms();
    let algebra = StarFreeAlgebra::new(n)?;
    let mu: Vec<Rational> = algebra.atom_subsets().iter().map(|&q| f.value(Element::from_bits(q)).clone()).collect();
    solve_signed_measure(n, &mu)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnboundedExample {
    pub submeasure: Submeasure,
    pub measure: SignedMeasure,
    /// The atoms {y} with |y| = 2, whose union is the element of interest.
    pub pair_atoms: Vec<u64>,
    pub value: Rational,
}

/// μ = 1/2 away from 0 and 1, μ(1) = 1: the pair atoms carry −C(n,2)/2 in total.
pub fn unbounded_example(n: usize) -> Result<UnboundedExample> {
    if n < 3 {
        return Err(Error::Range("the example needs n >= 3".into()));
    }
    if n > MAX_SOLVE_N {
        return Err(Error::SizeCap(format!("the solver handles at most {MAX_SOLVE_N} generators")));
    }
    let alg = FiniteAlgebra::new(n)?;
    let one = alg.one();
    let submeasure = Submeasure::from_functional(Functional::from_fn(alg, |a| {
        if a.is_zero() {
            rat(0, 1)
        } else if a == one {
            rat(1, 1)
        } else {
            rat(1, 2)
        }
    })?)?;
    let measure = solve_for_functional(submeasure.as_functional())?;
    let pair_atoms: Vec<u64> = measure.algebra().atom_subsets().iter().copied().filter(|y| y.count_ones() == 2).collect();
    let value = pair_atoms.iter().map(|&y| measure.atom_value(y)).sum();
    Ok(UnboundedExample { submeasure, measure, pair_atoms, value })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_quarters_example() {
        let alg = FiniteAlgebra::new(2).unwrap();
        let f = Functional::new(alg, vec![rat(0, 1), rat(3, 4), rat(3, 4), rat(1, 1)]).unwrap();
        let l = solve_for_functional(&f).unwrap();
        assert_eq!(l.values(), &[rat(1, 4), rat(1, 4), rat(1, 2)]);
    }

    #[test]
    fn unbounded_small_cases() {
        assert_eq!(unbounded_example(3).unwrap().value, rat(-3, 2));
        assert_eq!(unbounded_example(4).unwrap().value, rat(-3, 1));
        assert!(unbounded_example(2).is_err());
    }

    #[test]
    fn half_everywhere_at_three() {
        let ex = unbounded_example(3).unwrap();
        let m = &ex.measure;
        assert_eq!(m.atom_value(0b001), &rat(1, 2));
        assert_eq!(m.atom_value(0b011), &rat(-1, 2));
        assert_eq!(m.atom_value(0b111), &rat(1, 1));
        assert_eq!(m.values().iter().sum::<Rational>(), rat(1, 1));
    }
}
