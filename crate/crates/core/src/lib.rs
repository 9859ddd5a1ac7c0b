//! Exact computation with submeasures.
//!
//! The crate covers finite Boolean algebras and the clopen algebra of a
//! product space truncated at finite depth, exact-rational submeasure tables
//! with their classification and extension constructions, the weighted
//! cover machinery behind Talagrand's pathological submeasure, and the
//! linear transform sending a functional to its associated signed measure.

pub mod algebra;
pub mod error;
pub mod rational;
pub mod submeasure;
pub mod talagrand;
pub mod transform;

pub use error::{Error, Result};
pub use rational::Rational;
