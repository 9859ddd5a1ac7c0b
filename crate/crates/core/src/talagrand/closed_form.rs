use num_bigint::BigUint;
use num_traits::One;

use super::schedule::Schedule;
use super::weight::{compare_with_cap, Comparison, ExactWeight};
use crate::algebra::Prefix;
use crate::error::{Error, Result};
use crate::rational::Rational;

/// ψ(𝒯) = η(1)^α(1) = 2·w(1), the weight of the 2-rectangle.
pub fn psi_total(schedule: &Schedule) -> ExactWeight {
    schedule.level_weight(1, &BigUint::one()).scale_int(2)
}

/// ψ([s]) = min{2^(−δ(|I|)+1), w(|I|)} for a prefix with |I| ≥ 1; ψ(𝒯) for the empty prefix.
pub fn psi_cylinder(schedule: &Schedule, s: &Prefix, precision_cap: u64) -> Result<ExactWeight> {
    if s.is_empty() {
        return Ok(psi_total(schedule));
    }
    let card = BigUint::from(s.len());
    let delta = schedule.delta(&card)?;
    let spike = ExactWeight::pow2(&Rational::from_integer((1 - delta as i64).into()));
    let w = schedule.level_weight(delta, &card);
    match compare_with_cap(&spike, &w, precision_cap).0 {
        Comparison::Undecided { bits } => Err(Error::Undecided { bits }),
        Comparison::Greater => Ok(w),
        _ => Ok(spike),
    }
}
