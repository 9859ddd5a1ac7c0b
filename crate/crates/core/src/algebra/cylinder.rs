use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use fixedbitset::FixedBitSet;

use super::BooleanAlgebra;
use crate::error::{Error, Result};

/// Default leaf cap: depth 6 of the Talagrand space has 2^21 leaves.
pub const DEFAULT_MAX_LEAVES: usize = 1 << 21;

/// The product ∏ᵢ [Xᵢ] truncated at a finite maximal depth.
///
/// Points are value sequences with 1-based values; a depth-`d` leaf is encoded
/// in mixed radix with coordinate 1 most significant.
#[derive(Clone)]
pub struct CylinderSpace {
    branching: Arc<[usize]>,
    max_leaves: usize,
}

impl fmt::Debug for CylinderSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CylinderSpace").field("branching", &self.branching).finish()
    }
}

impl PartialEq for CylinderSpace {
    fn eq(&self, other: &Self) -> bool {
        self.branching == other.branching
    }
}

impl Eq for CylinderSpace {}

impl CylinderSpace {
    pub fn new(branching: Vec<usize>) -> Result<Self> {
        if branching.contains(&0) {
            return Err(Error::Range("branching values must be positive".into()));
        }
        Ok(CylinderSpace { branching: branching.into(), max_leaves: DEFAULT_MAX_LEAVES })
    }

    /// ∏ₙ [2ⁿ] up to coordinate `depth`.
    pub fn talagrand(depth: usize) -> Result<Self> {
        if depth > 62 {
            return Err(Error::Range(format!("depth {depth} is too large")));
        }
        Self::new((1..=depth).map(|n| 1usize << n).collect())
    }

    pub fn with_max_leaves(mut self, cap: usize) -> Self {
        self.max_leaves = cap;
        self
    }

    pub fn max_leaves(&self) -> usize {
        self.max_leaves
    }

    pub fn max_depth(&self) -> usize {
        self.branching.len()
    }

    /// |X_coordinate|, 1-based coordinate.
    pub fn branching(&self, coordinate: usize) -> usize {
        self.branching[coordinate - 1]
    }

    pub fn branching_values(&self) -> &[usize] {
        &self.branching
    }

    /// Number of depth-`depth` leaves, or a cap error.
    pub fn leaf_count(&self, depth: usize) -> Result<usize> {
        if depth > self.max_depth() {
            return Err(Error::Range(format!(
                "depth {depth} exceeds the space depth {}",
                self.max_depth()
            )));
        }
        let mut count: u128 = 1;
        for &b in &self.branching[..depth] {
            count = count.saturating_mul(b as u128);
            if count > self.max_leaves as u128 {
                return Err(Error::DepthCap { depth, leaves: count, cap: self.max_leaves });
            }
        }
        Ok(count as usize)
    }

    /// Leaves of depth `to` below one leaf of depth `from`.
    fn span(&self, from: usize, to: usize) -> usize {
        self.branching[from..to].iter().product()
    }

    /// 0-based digit of `coordinate` within a depth-`depth` leaf index.
    pub fn digit(&self, depth: usize, leaf: usize, coordinate: usize) -> usize {
        (leaf / self.span(coordinate, depth)) % self.branching(coordinate)
    }

    /// 1-based values of a depth-`depth` leaf.
    pub fn decode(&self, depth: usize, mut leaf: usize) -> Vec<usize> {
        let mut values = vec![0; depth];
        for c in (0..depth).rev() {
            values[c] = leaf % self.branching[c] + 1;
            leaf /= self.branching[c];
        }
        values
    }

    /// Leaf index of a point given by 1-based values.
    pub fn encode(&self, values: &[usize]) -> Result<usize> {
        let mut leaf = 0usize;
        for (c, &v) in values.iter().enumerate() {
            let b = *self.branching.get(c).ok_or_else(|| {
                Error::InvalidPrefix(format!("point has more than {} coordinates", self.max_depth()))
            })?;
            if v == 0 || v > b {
                return Err(Error::InvalidPrefix(format!(
                    "value {v} at coordinate {} outside [1, {b}]",
                    c + 1
                )));
            }
            leaf = leaf * b + (v - 1);
        }
        Ok(leaf)
    }

    pub fn empty(&self, depth: usize) -> Result<CylinderSet> {
        let n = self.leaf_count(depth)?;
        Ok(CylinderSet { space: self.clone(), depth, leaves: FixedBitSet::with_capacity(n) })
    }

    pub fn full(&self, depth: usize) -> Result<CylinderSet> {
        let mut set = self.empty(depth)?;
        set.leaves.insert_range(..);
        Ok(set)
    }

    pub fn from_leaves<I: IntoIterator<Item = usize>>(&self, depth: usize, leaves: I) -> Result<CylinderSet> {
        let mut set = self.empty(depth)?;
        for leaf in leaves {
            if leaf >= set.leaves.len() {
                return Err(Error::Range(format!("leaf {leaf} outside depth {depth}")));
            }
            set.leaves.insert(leaf);
        }
        Ok(set)
    }

    /// Wraps a leaf bitset of the right length.
    pub fn from_bitset(&self, depth: usize, leaves: FixedBitSet) -> Result<CylinderSet> {
        let n = self.leaf_count(depth)?;
        if leaves.len() != n {
            return Err(Error::Range(format!("bitset length {} is not {n}", leaves.len())));
        }
        Ok(CylinderSet { space: self.clone(), depth, leaves })
    }
}

/// A clopen set stored as a leaf set at some depth.
#[derive(Clone)]
pub struct CylinderSet {
    space: CylinderSpace,
    depth: usize,
    leaves: FixedBitSet,
}

impl fmt::Debug for CylinderSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CylinderSet")
            .field("depth", &self.depth)
            .field("leaves", &self.leaves.ones().collect::<Vec<_>>())
            .finish()
    }
}

impl PartialEq for CylinderSet {
    fn eq(&self, other: &Self) -> bool {
        if self.space != other.space {
            return false;
        }
        if self.depth == other.depth {
            return self.leaves == other.leaves;
        }
        let (a, b) = (self.canonical(), other.canonical());
        a.depth == b.depth && a.leaves == b.leaves
    }
}

impl Eq for CylinderSet {}

impl CylinderSet {
    pub fn space(&self) -> &CylinderSpace {
        &self.space
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn leaves(&self) -> &FixedBitSet {
        &self.leaves
    }

    pub fn leaf_count(&self) -> usize {
        self.leaves.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.leaves.is_clear()
    }

    pub fn is_full(&self) -> bool {
        self.leaves.is_full()
    }

    /// Points (1-based values at this set's depth).
    pub fn points(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        self.leaves.ones().map(|leaf| self.space.decode(self.depth, leaf))
    }

    /// Membership of a point given by at least `depth` values.
    pub fn contains_point(&self, values: &[usize]) -> Result<bool> {
        if values.len() < self.depth {
            return Err(Error::DepthTooShallow { depth: values.len(), coordinate: self.depth });
        }
        let leaf = self.space.encode(&values[..self.depth])?;
        Ok(self.leaves.contains(leaf))
    }

    /// The same set stored at a larger depth.
    pub fn expand_to(&self, depth: usize) -> Result<CylinderSet> {
        if depth < self.depth {
            return Err(Error::Range(format!("cannot shrink depth {} to {depth}", self.depth)));
        }
        if depth == self.depth {
            return Ok(self.clone());
        }
        let mut out = self.space.empty(depth)?;
        let span = self.space.span(self.depth, depth);
        for leaf in self.leaves.ones() {
            out.leaves.insert_range(leaf * span..(leaf + 1) * span);
        }
        Ok(out)
    }

    /// The same set stored at the least depth that can express it.
    pub fn canonical(&self) -> CylinderSet {
        let mut cur = self.clone();
        while cur.depth > 0 {
            let b = cur.space.branching(cur.depth);
            let parents = cur.leaves.len() / b;
            let mut shrunk = FixedBitSet::with_capacity(parents);
            let mut ok = true;
            for p in 0..parents {
                let hits = cur.leaves.count_ones(p * b..(p + 1) * b);
                if hits == b {
                    shrunk.insert(p);
                } else if hits != 0 {
                    ok = false;
                    break;
                }
            }
            if !ok {
                break;
            }
            cur = CylinderSet { space: cur.space.clone(), depth: cur.depth - 1, leaves: shrunk };
        }
        cur
    }

    fn aligned(&self, other: &CylinderSet) -> Result<(CylinderSet, CylinderSet)> {
        if self.space != other.space {
            return Err(Error::Precondition("cylinder sets live in different spaces".into()));
        }
        let depth = self.depth.max(other.depth);
        Ok((self.expand_to(depth)?, other.expand_to(depth)?))
    }

    pub fn union(&self, other: &CylinderSet) -> Result<CylinderSet> {
        let (mut a, b) = self.aligned(other)?;
        a.leaves.union_with(&b.leaves);
        Ok(a)
    }

    pub fn intersection(&self, other: &CylinderSet) -> Result<CylinderSet> {
        let (mut a, b) = self.aligned(other)?;
        a.leaves.intersect_with(&b.leaves);
        Ok(a)
    }

    pub fn difference(&self, other: &CylinderSet) -> Result<CylinderSet> {
        let (mut a, b) = self.aligned(other)?;
        a.leaves.difference_with(&b.leaves);
        Ok(a)
    }

    pub fn complement(&self) -> CylinderSet {
        let mut out = self.clone();
        out.leaves.toggle_range(..);
        out
    }

    pub fn is_subset(&self, other: &CylinderSet) -> Result<bool> {
        let (a, b) = self.aligned(other)?;
        Ok(a.leaves.is_subset(&b.leaves))
    }

    pub fn is_disjoint(&self, other: &CylinderSet) -> Result<bool> {
        let (a, b) = self.aligned(other)?;
        Ok(a.leaves.is_disjoint(&b.leaves))
    }
}

/// Boolean algebra of clopen sets at a fixed depth.
#[derive(Debug, Clone)]
pub struct ClopenAlgebra {
    space: CylinderSpace,
    depth: usize,
}

impl ClopenAlgebra {
    pub fn new(space: CylinderSpace, depth: usize) -> Result<Self> {
        space.leaf_count(depth)?;
        Ok(ClopenAlgebra { space, depth })
    }
}

impl BooleanAlgebra for ClopenAlgebra {
    type Elem = CylinderSet;

    fn zero(&self) -> CylinderSet {
        self.space.empty(self.depth).expect("depth checked at construction")
    }
    fn one(&self) -> CylinderSet {
        self.space.full(self.depth).expect("depth checked at construction")
    }
    fn meet(&self, a: &CylinderSet, b: &CylinderSet) -> CylinderSet {
        a.intersection(b).expect("operands share the space")
    }
    fn join(&self, a: &CylinderSet, b: &CylinderSet) -> CylinderSet {
        a.union(b).expect("operands share the space")
    }
    fn complement(&self, a: &CylinderSet) -> CylinderSet {
        a.complement()
    }
    fn is_zero(&self, a: &CylinderSet) -> bool {
        a.is_empty()
    }
}

/// A partial assignment of 1-based values to 1-based coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Prefix {
    assignments: BTreeMap<usize, usize>,
}

impl Prefix {
    pub fn new(assignments: BTreeMap<usize, usize>) -> Result<Self> {
        if assignments.iter().any(|(&c, &v)| c == 0 || v == 0) {
            return Err(Error::InvalidPrefix("coordinates and values are 1-based".into()));
        }
        Ok(Prefix { assignments })
    }

    /// The prefix assigning `values[i]` to coordinate `i + 1`.
    pub fn from_values(values: &[usize]) -> Result<Self> {
        Self::new(values.iter().enumerate().map(|(i, &v)| (i + 1, v)).collect())
    }

    pub fn empty() -> Self {
        Prefix::default()
    }

    pub fn assignments(&self) -> &BTreeMap<usize, usize> {
        &self.assignments
    }

    pub fn get(&self, coordinate: usize) -> Option<usize> {
        self.assignments.get(&coordinate).copied()
    }

    pub fn len(&self) -> usize {
        self.assignments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignments.is_empty()
    }

    pub fn max_coordinate(&self) -> usize {
        self.assignments.keys().next_back().copied().unwrap_or(0)
    }

    /// True when the domain is {1, …, m} for some m ≥ 0.
    pub fn is_initial_segment(&self) -> bool {
        self.assignments.keys().enumerate().all(|(i, &c)| c == i + 1)
    }

    /// Values in coordinate order.
    pub fn values(&self) -> Vec<usize> {
        self.assignments.values().copied().collect()
    }

    fn check(&self, space: &CylinderSpace, depth: usize) -> Result<()> {
        if depth > space.max_depth() {
            return Err(Error::Range(format!(
                "depth {depth} exceeds the space depth {}",
                space.max_depth()
            )));
        }
        for (&c, &v) in &self.assignments {
            if c > depth {
                return Err(Error::DepthTooShallow { depth, coordinate: c });
            }
            if v > space.branching(c) {
                return Err(Error::InvalidPrefix(format!(
                    "value {v} at coordinate {c} outside [1, {}]",
                    space.branching(c)
                )));
            }
        }
        Ok(())
    }
}

fn leaves_where(
    space: &CylinderSpace,
    depth: usize,
    keep: impl Fn(&[(usize, usize, usize)], usize) -> bool,
    constraints: &[(usize, usize)],
) -> Result<CylinderSet> {
    let mut out = space.empty(depth)?;
    // (span, branching, 0-based value) per constrained coordinate
    let digits: Vec<(usize, usize, usize)> = constraints
        .iter()
        .map(|&(c, v)| (space.span(c, depth), space.branching(c), v - 1))
        .collect();
    for leaf in 0..out.leaves.len() {
        if keep(&digits, leaf) {
            out.leaves.insert(leaf);
        }
    }
    Ok(out)
}

/// The cylinder [s]: all depth-`depth` leaves agreeing with `s` on its domain.
pub fn cylinder_from_prefix(space: &CylinderSpace, s: &Prefix, depth: usize) -> Result<CylinderSet> {
    s.check(space, depth)?;
    let constraints: Vec<_> = s.assignments.iter().map(|(&c, &v)| (c, v)).collect();
    leaves_where(
        space,
        depth,
        |digits, leaf| digits.iter().all(|&(span, b, v)| (leaf / span) % b == v),
        &constraints,
    )
}

/// The set ∩_{n∈I} S_{n,τ(n)} of points avoiding value τ(n) at every n ∈ I.
pub fn dset_to_cylinder(
    space: &CylinderSpace,
    excluded: &BTreeMap<usize, usize>,
    depth: usize,
) -> Result<CylinderSet> {
    let as_prefix = Prefix::new(excluded.clone())?;
    as_prefix.check(space, depth)?;
    let constraints: Vec<_> = excluded.iter().map(|(&c, &v)| (c, v)).collect();
    leaves_where(
        space,
        depth,
        |digits, leaf| digits.iter().all(|&(span, b, v)| (leaf / span) % b != v),
        &constraints,
    )
}

/// π_{[s]}⁻¹[B]: points whose overwrite by `s` on [m] lands in `b`.
pub fn preimage_pi(space: &CylinderSpace, s: &Prefix, b: &CylinderSet) -> Result<CylinderSet> {
    if !s.is_initial_segment() {
        return Err(Error::InvalidPrefix("domain must be an initial segment [m]".into()));
    }
    if *b.space() != *space {
        return Err(Error::Precondition("set lives in a different space".into()));
    }
    let m = s.len();
    let depth = b.depth().max(m);
    s.check(space, depth)?;
    let b = b.expand_to(depth)?;
    let head = space.encode(&s.values())?;
    let tails = space.span(m, depth);
    let heads = space.leaf_count(m)?;
    let mut out = space.empty(depth)?;
    for tail in 0..tails {
        if b.leaves.contains(head * tails + tail) {
            for h in 0..heads {
                out.leaves.insert(h * tails + tail);
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn talagrand(d: usize) -> CylinderSpace {
        CylinderSpace::talagrand(d).unwrap()
    }

    fn prefix(pairs: &[(usize, usize)]) -> Prefix {
        Prefix::new(pairs.iter().copied().collect()).unwrap()
    }

    #[test]
    fn prefix_cylinders() {
        let sp = talagrand(4);
        assert_eq!(cylinder_from_prefix(&sp, &Prefix::empty(), 2).unwrap().leaf_count(), 8);
        assert_eq!(cylinder_from_prefix(&sp, &prefix(&[(1, 1)]), 1).unwrap().leaf_count(), 1);
        let c = cylinder_from_prefix(&sp, &prefix(&[(2, 3)]), 2).unwrap();
        assert_eq!(c.leaf_count(), 2);
        assert!(c.points().all(|p| p[1] == 3));
    }

    #[test]
    fn prefix_errors() {
        let sp = talagrand(3);
        assert!(matches!(
            cylinder_from_prefix(&sp, &prefix(&[(1, 3)]), 1),
            Err(Error::InvalidPrefix(_))
        ));
        assert!(matches!(
            cylinder_from_prefix(&sp, &prefix(&[(3, 1)]), 2),
            Err(Error::DepthTooShallow { .. })
        ));
    }

    #[test]
    fn dset_cylinders() {
        let sp = talagrand(4);
        let d1 = dset_to_cylinder(&sp, &BTreeMap::from([(1, 1)]), 1).unwrap();
        assert_eq!(d1.points().collect::<Vec<_>>(), vec![vec![2]]);
        assert!(dset_to_cylinder(&sp, &BTreeMap::new(), 3).unwrap().is_full());
        assert_eq!(dset_to_cylinder(&sp, &BTreeMap::from([(1, 1), (2, 1)]), 2).unwrap().leaf_count(), 3);
        assert!(matches!(
            dset_to_cylinder(&sp, &BTreeMap::from([(3, 1)]), 2),
            Err(Error::DepthTooShallow { .. })
        ));
    }

    #[test]
    fn dset_leaf_count_formula() {
        let sp = talagrand(4);
        for mask in 0u32..16 {
            let excluded: BTreeMap<_, _> =
                (1..=4).filter(|n| mask >> (n - 1) & 1 == 1).map(|n| (n, n)).collect();
            let set = dset_to_cylinder(&sp, &excluded, 4).unwrap();
            let want: usize = (1..=4).map(|n| (1 << n) - usize::from(excluded.contains_key(&n))).product();
            assert_eq!(set.leaf_count(), want);
            let brute = (0..1024).filter(|&l| {
                let p = sp.decode(4, l);
                excluded.iter().all(|(&c, &v)| p[c - 1] != v)
            });
            assert_eq!(brute.count(), want);
        }
    }

    #[test]
    fn preimage_examples() {
        let sp = talagrand(3);
        let s = prefix(&[(1, 1)]);
        let cyl = cylinder_from_prefix(&sp, &s, 1).unwrap();
        assert!(preimage_pi(&sp, &s, &cyl).unwrap().is_full());
        assert!(preimage_pi(&sp, &s, &sp.empty(2).unwrap()).unwrap().is_empty());
        let b = cylinder_from_prefix(&sp, &prefix(&[(2, 1)]), 2).unwrap();
        assert_eq!(preimage_pi(&sp, &s, &b).unwrap(), b);
        assert!(matches!(preimage_pi(&sp, &prefix(&[(2, 1)]), &b), Err(Error::InvalidPrefix(_))));
    }

    #[test]
    fn preimage_matches_pointwise_definition() {
        let sp = talagrand(3);
        let s = prefix(&[(1, 2), (2, 3)]);
        let b = sp.from_leaves(3, (0..64).filter(|l| l % 3 == 0)).unwrap();
        let pre = preimage_pi(&sp, &s, &b).unwrap();
        for leaf in 0..64 {
            let mut p = sp.decode(3, leaf);
            let inside = pre.leaves().contains(leaf);
            p[0] = 2;
            p[1] = 3;
            assert_eq!(inside, b.contains_point(&p).unwrap());
        }
    }

    #[test]
    fn canonical_and_expansion() {
        let sp = talagrand(4);
        let c = cylinder_from_prefix(&sp, &prefix(&[(1, 2)]), 3).unwrap();
        let canon = c.canonical();
        assert_eq!(canon.depth(), 1);
        assert_eq!(canon.expand_to(3).unwrap().leaves(), c.leaves());
        assert_eq!(c, canon);
        assert_eq!(sp.full(3).unwrap().canonical().depth(), 0);
        assert_eq!(sp.full(0).unwrap(), sp.full(4).unwrap());
    }

    #[test]
    fn leaf_cap_is_enforced() {
        let sp = talagrand(7);
        assert!(sp.leaf_count(6).is_ok());
        assert!(matches!(sp.leaf_count(7), Err(Error::DepthCap { .. })));
    }

    #[test]
    fn encode_decode_round_trip() {
        let sp = talagrand(3);
        for leaf in 0..64 {
            assert_eq!(sp.encode(&sp.decode(3, leaf)).unwrap(), leaf);
        }
    }
}
