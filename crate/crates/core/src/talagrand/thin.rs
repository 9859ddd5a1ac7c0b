//! The thinness predicate: every depth-m cylinder keeps a heavy piece outside X.

use super::schedule::Schedule;
use super::search::{min_weight_cover_with_cap, CoverUniverse};
use super::weight::{compare_with_cap, Comparison, ExactWeight};
use crate::algebra::{cylinder_from_prefix, preimage_pi, CylinderSet, CylinderSpace, Prefix};
use crate::error::{Error, Result};

/// A submeasure that can be evaluated on clopen subsets of the space.
pub trait CylinderMeasure {
    fn measure(&self, set: &CylinderSet) -> Result<ExactWeight>;
}

impl<F> CylinderMeasure for F
where
    F: Fn(&CylinderSet) -> Result<ExactWeight>,
{
    fn measure(&self, set: &CylinderSet) -> Result<ExactWeight> {
        self(set)
    }
}

/// ψ restricted to a finite universe of D-sets, evaluated by exact cover search.
#[derive(Debug, Clone)]
pub struct RestrictedPsi {
    pub schedule: Schedule,
    pub universe: CoverUniverse,
    pub precision_cap: u64,
}

impl CylinderMeasure for RestrictedPsi {
    fn measure(&self, set: &CylinderSet) -> Result<ExactWeight> {
        Ok(min_weight_cover_with_cap(&self.schedule, self.universe, set, self.precision_cap)?.weight)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThinWitness {
    /// The depth-m cylinder A, as its prefix.
    pub cylinder: Prefix,
    /// The largest depth-n set below A missing X.
    pub piece: CylinderSet,
    /// μ of the piece pulled back along π_A.
    pub value: ExactWeight,
    pub heavy: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThinReport {
    pub thin: bool,
    pub witnesses: Vec<ThinWitness>,
}

/// Depth-n leaves meeting `x`.
fn shadow(x: &CylinderSet, n: usize) -> Result<CylinderSet> {
    let space = x.space();
    if x.depth() <= n {
        return x.expand_to(n);
    }
    let fine = x.leaves();
    let block = fine.len() / space.leaf_count(n)?;
    space.from_leaves(n, (0..space.leaf_count(n)?).filter(|&l| fine.ones().any(|f| f / block == l)))
}

/// Decides whether X is (m, n, μ)-thin. Since μ is monotone it suffices to
/// test the largest admissible B below each A, namely A ∖ shadow_n(X).
pub fn is_thin(space: &CylinderSpace, x: &CylinderSet, m: usize, n: usize, mu: &dyn CylinderMeasure, cap: u64) -> Result<ThinReport> {
    if m >= n {
        return Err(Error::Range("thinness needs m < n".into()));
    }
    if x.space() != space {
        return Err(Error::Precondition("set lives in a different space".into()));
    }
    let outside = shadow(x, n)?.complement();
    let one = ExactWeight::from_integer(1);
    let mut witnesses = Vec::new();
    for head in 0..space.leaf_count(m)? {
        let s = Prefix::from_values(&space.decode(m, head))?;
        let a = cylinder_from_prefix(space, &s, n)?;
        let piece = a.intersection(&outside)?;
        let value = mu.measure(&preimage_pi(space, &s, &piece)?)?;
        let heavy = match compare_with_cap(&value, &one, cap).0 {
            Comparison::Undecided { bits } => return Err(Error::Undecided { bits }),
            c => c != Comparison::Less,
        };
        witnesses.push(ThinWitness { cylinder: s, piece, value, heavy });
    }
    Ok(ThinReport { thin: witnesses.iter().all(|w| w.heavy), witnesses })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::Rational;
    use crate::talagrand::weight::DEFAULT_PRECISION_CAP;

    fn counting(set: &CylinderSet) -> Result<ExactWeight> {
        let frac = Rational::new((set.leaf_count() as i64).into(), (set.leaves().len() as i64).into());
        Ok(ExactWeight::from_rational(frac * Rational::from_integer(2.into())))
    }

    #[test]
    fn empty_set_is_thin() {
        let sp = CylinderSpace::talagrand(3).unwrap();
        let r = is_thin(&sp, &sp.empty(2).unwrap(), 1, 2, &counting, DEFAULT_PRECISION_CAP).unwrap();
        assert!(r.thin);
        assert_eq!(r.witnesses.len(), 2);
    }

    #[test]
    fn whole_space_is_not_thin() {
        let sp = CylinderSpace::talagrand(3).unwrap();
        let r = is_thin(&sp, &sp.full(0).unwrap(), 1, 2, &counting, DEFAULT_PRECISION_CAP).unwrap();
        assert!(!r.thin);
        assert!(r.witnesses.iter().all(|w| w.piece.is_empty()));
    }

    #[test]
    fn shadow_of_a_deep_set() {
        let sp = CylinderSpace::talagrand(3).unwrap();
        let x = sp.from_leaves(3, [0, 9]).unwrap();
        let s = shadow(&x, 2).unwrap();
        assert_eq!(s.leaves().ones().collect::<Vec<_>>(), vec![0, 1]);
    }
}
