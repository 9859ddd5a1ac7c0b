use std::collections::{BTreeMap, BTreeSet};

use super::cover::{dsets_as_cylinders, is_proper_cover, CoverVerdict};
use super::dset::DSet;
use crate::algebra::CylinderSpace;
use crate::error::{Error, Result};

/// Result of a search for distinct representatives.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Cdr {
    /// `representatives[i]` ∈ sets[i], pairwise distinct.
    Representatives(Vec<usize>),
    /// Indices J with |∪_{i∈J} sets[i]| < |J|.
    Deficient(BTreeSet<usize>),
}

/// Finds a complete system of distinct representatives by augmenting paths,
/// or a set of indices violating Hall's condition.
pub fn cdr_find(sets: &[BTreeSet<usize>]) -> Cdr {
    let mut owner: BTreeMap<usize, usize> = BTreeMap::new();
    let mut rep: Vec<Option<usize>> = vec![None; sets.len()];

    fn augment(
        i: usize,
        sets: &[BTreeSet<usize>],
        owner: &mut BTreeMap<usize, usize>,
        rep: &mut [Option<usize>],
        seen_left: &mut BTreeSet<usize>,
        seen_right: &mut BTreeSet<usize>,
    ) -> bool {
        seen_left.insert(i);
        for &v in &sets[i] {
            if !seen_right.insert(v) {
                continue;
            }
            let free = match owner.get(&v) {
                None => true,
                Some(&j) => augment(j, sets, owner, rep, seen_left, seen_right),
            };
            if free {
                owner.insert(v, i);
                rep[i] = Some(v);
                return true;
            }
        }
        false
    }

    for i in 0..sets.len() {
        let mut seen_left = BTreeSet::new();
        let mut seen_right = BTreeSet::new();
        if !augment(i, sets, &mut owner, &mut rep, &mut seen_left, &mut seen_right) {
            // every right vertex reached is matched inside the reached left set, minus i
            return Cdr::Deficient(seen_left);
        }
    }
    Cdr::Representatives(rep.into_iter().map(|r| r.expect("all matched")).collect())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HallCheck {
    pub union_size: usize,
    pub family_size: usize,
    /// |∪ index sets| ≤ |family| − 1.
    pub passed: bool,
}

/// Checks |∪ᵢ Iᵢ| ≤ |family| − 1 for a proper cover of the whole space.
pub fn hall_bound_check(space: &CylinderSpace, family: &[DSet]) -> Result<HallCheck> {
    let depth = family.iter().map(DSet::max_coordinate).max().unwrap_or(0);
    let cylinders = dsets_as_cylinders(space, family, depth)?;
    let whole = space.full(depth)?;
    if is_proper_cover(&cylinders, &whole)? != CoverVerdict::Proper {
        return Err(Error::Precondition("family is not a proper cover of the space".into()));
    }
    let union: BTreeSet<usize> = family.iter().flat_map(DSet::index_set).collect();
    Ok(HallCheck {
        union_size: union.len(),
        family_size: family.len(),
        passed: union.len() < family.len(),
    })
}
