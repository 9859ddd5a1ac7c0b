//! Functionals and their associated signed measures.
//!
//! A functional μ on an algebra with atoms p₁, …, pₙ corresponds to the
//! unique signed measure λ on 𝒫(𝒫([n])⁺) with λ(∪_{i∈q} aᵢ) = μ(∪_{i∈q} pᵢ),
//! where aᵢ = {y : i ∈ y} are the *-free generators.

mod chain;
mod levels;
mod matrix;
mod pullback;
mod solve;
mod star_free;

pub use chain::{transform_functional, ChainLevel, CoherenceReport, Embedding, GoodMap, TransformChain};
pub use levels::{build_levels, LevelSystem, MAX_LEVEL_SIZE};
pub use matrix::{
    assemble_next, incidence_matrix, incidence_matrix_in_order, recursive_order, solve_exact, BitMatrix,
    MAX_INCIDENCE_N,
};
pub use pullback::{pullback_submeasure, UnionMap};
pub use solve::{solve_for_functional, solve_signed_measure, unbounded_example, UnboundedExample, MAX_SOLVE_N};
pub use star_free::{
    star_free_check, subset_key, SignedMeasure, StarFreeAlgebra, StarFreeVerdict, MAX_ELEMENT_GENERATORS,
    MAX_GENERATORS,
};
