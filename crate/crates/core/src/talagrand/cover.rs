use super::dset::DSet;
use crate::algebra::{CylinderSet, CylinderSpace};
use crate::error::{Error, Result};

/// Outcome of a proper-cover check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CoverVerdict {
    Proper,
    /// Indices of a proper subfamily that still covers.
    Improper { subfamily: Vec<usize> },
    /// A target point (1-based values) left uncovered.
    NotCover { point: Vec<usize> },
}

pub fn dsets_as_cylinders(space: &CylinderSpace, family: &[DSet], depth: usize) -> Result<Vec<CylinderSet>> {
    family.iter().map(|x| x.to_cylinder(space, depth)).collect()
}

/// Checks that `family` covers `target` and that no proper subfamily does.
/// It suffices to test the subfamilies with one member removed.
pub fn is_proper_cover(family: &[CylinderSet], target: &CylinderSet) -> Result<CoverVerdict> {
    let space = target.space();
    if family.iter().any(|x| x.space() != space) {
        return Err(Error::Precondition("family and target live in different spaces".into()));
    }
    let depth = family.iter().map(CylinderSet::depth).chain([target.depth()]).max().unwrap_or(0);
    let target = target.expand_to(depth)?;
    let members = family.iter().map(|x| x.expand_to(depth)).collect::<Result<Vec<_>>>()?;
    let mut multiplicity = vec![0u32; target.leaves().len()];
    for x in &members {
        for leaf in x.leaves().intersection(target.leaves()) {
            multiplicity[leaf] += 1;
        }
    }
    if let Some(leaf) = target.leaves().ones().find(|&l| multiplicity[l] == 0) {
        return Ok(CoverVerdict::NotCover { point: space.decode(depth, leaf) });
    }
    for (i, x) in members.iter().enumerate() {
        if x.leaves().intersection(target.leaves()).all(|l| multiplicity[l] >= 2) {
            let subfamily = (0..members.len()).filter(|&j| j != i).collect();
            return Ok(CoverVerdict::Improper { subfamily });
        }
    }
    Ok(CoverVerdict::Proper)
}
