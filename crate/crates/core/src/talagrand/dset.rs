use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigUint;
use serde_json::{json, Map, Value};

use super::schedule::Schedule;
use super::weight::ExactWeight;
use crate::algebra::{dset_to_cylinder, CylinderSet, CylinderSpace, Prefix};
use crate::error::{Error, Result};

/// The set ∩_{n∈I} S_{n,τ(n)} of points f with f(n) ≠ τ(n) for all n ∈ I.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DSet {
    excluded: BTreeMap<usize, usize>,
}

impl DSet {
    /// `excluded` maps each coordinate n ∈ I to τ(n); both 1-based.
    pub fn new(excluded: BTreeMap<usize, usize>) -> Result<Self> {
        if excluded.is_empty() {
            return Err(Error::Precondition("a D-set needs a nonempty index set".into()));
        }
        if excluded.iter().any(|(&n, &t)| n == 0 || t == 0) {
            return Err(Error::InvalidPrefix("coordinates and values are 1-based".into()));
        }
        Ok(DSet { excluded })
    }

    pub fn from_pairs(pairs: &[(usize, usize)]) -> Result<Self> {
        Self::new(pairs.iter().copied().collect())
    }

    pub fn excluded(&self) -> &BTreeMap<usize, usize> {
        &self.excluded
    }

    pub fn index_set(&self) -> BTreeSet<usize> {
        self.excluded.keys().copied().collect()
    }

    /// |I|.
    pub fn card(&self) -> usize {
        self.excluded.len()
    }

    /// τ(n).
    pub fn value(&self, n: usize) -> Option<usize> {
        self.excluded.get(&n).copied()
    }

    pub fn max_coordinate(&self) -> usize {
        *self.excluded.keys().next_back().expect("index set is nonempty")
    }

    /// Membership of a point given by 1-based values.
    pub fn contains(&self, point: &[usize]) -> bool {
        self.excluded.iter().all(|(&n, &t)| point.get(n - 1).is_some_and(|&v| v != t))
    }

    pub fn to_cylinder(&self, space: &CylinderSpace, depth: usize) -> Result<CylinderSet> {
        dset_to_cylinder(space, &self.excluded, depth)
    }

    /// w(|I|).
    pub fn weight(&self, schedule: &Schedule) -> Result<ExactWeight> {
        schedule.weight(&BigUint::from(self.card()))
    }

    pub fn to_json(&self) -> Value {
        let tau: Map<String, Value> = self.excluded.iter().map(|(n, t)| (n.to_string(), json!(t))).collect();
        json!({ "tau": tau })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let tau = v
            .get("tau")
            .and_then(Value::as_object)
            .ok_or_else(|| Error::Format("D-set needs an object field \"tau\"".into()))?;
        let mut excluded = BTreeMap::new();
        for (k, t) in tau {
            let n: usize = k.parse().map_err(|_| Error::Format(format!("bad coordinate {k:?}")))?;
            let t = t.as_u64().ok_or_else(|| Error::Format(format!("bad value {t}")))? as usize;
            excluded.insert(n, t);
        }
        Self::new(excluded)
    }
}

/// Σ w(|I|) over the family.
pub fn family_weight(schedule: &Schedule, family: &[DSet]) -> Result<ExactWeight> {
    let mut counts: BTreeMap<usize, u64> = BTreeMap::new();
    for x in family {
        *counts.entry(x.card()).or_default() += 1;
    }
    let mut total = ExactWeight::zero();
    for (card, count) in counts {
        total = total.add(&schedule.weight(&BigUint::from(card))?.scale_int(count));
    }
    Ok(total)
}

/// N D-sets on the common index set I (|I| = N − 1), row r taking value r at
/// every coordinate.
pub fn make_rectangle(n_rows: usize, index_set: &BTreeSet<usize>) -> Result<Vec<DSet>> {
    if n_rows < 2 {
        return Err(Error::Range("a rectangle has at least 2 rows".into()));
    }
    if index_set.len() != n_rows - 1 {
        return Err(Error::Precondition(format!(
            "an {n_rows}-rectangle needs an index set of size {}",
            n_rows - 1
        )));
    }
    if let Some(&n) = index_set.iter().find(|&&n| n == 0 || (n < 64 && (1usize << n) < n_rows)) {
        return Err(Error::Infeasible(format!(
            "coordinate {n} has fewer than {n_rows} values"
        )));
    }
    (1..=n_rows)
        .map(|r| DSet::new(index_set.iter().map(|&n| (n, r)).collect()))
        .collect()
}

/// N D-sets on a common index set of size N − 1 with pairwise distinct values
/// at every coordinate.
pub fn is_rectangle(family: &[DSet]) -> bool {
    let Some(first) = family.first() else {
        return false;
    };
    let index = first.index_set();
    if family.len() < 2 || index.len() != family.len() - 1 {
        return false;
    }
    family.iter().all(|x| x.index_set() == index)
        && index.iter().all(|&n| {
            let values: BTreeSet<_> = family.iter().map(|x| x.value(n)).collect();
            values.len() == family.len()
        })
}

/// The D-set on J whose value at j is the least value of [branching(j)]
/// avoided by every prefix of S.
pub fn make_spike(
    space: &CylinderSpace,
    index_set: &BTreeSet<usize>,
    prefixes: &[Prefix],
    j: &BTreeSet<usize>,
) -> Result<DSet> {
    if j.is_empty() {
        return Err(Error::Precondition("J must be nonempty".into()));
    }
    if !j.is_subset(index_set) {
        return Err(Error::Precondition("J must be a subset of I".into()));
    }
    for s in prefixes {
        if s.assignments().keys().copied().collect::<BTreeSet<_>>() != *index_set {
            return Err(Error::Precondition("every prefix must have domain I".into()));
        }
    }
    let mut excluded = BTreeMap::new();
    for &n in j {
        if n > space.max_depth() {
            return Err(Error::DepthTooShallow { depth: space.max_depth(), coordinate: n });
        }
        let used: BTreeSet<usize> = prefixes.iter().filter_map(|s| s.get(n)).collect();
        let t = (1..=space.branching(n))
            .find(|v| !used.contains(v))
            .ok_or_else(|| Error::Infeasible(format!("every value at coordinate {n} is taken")))?;
        excluded.insert(n, t);
    }
    DSet::new(excluded)
}
