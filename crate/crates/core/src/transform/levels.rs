//! The levels T₁, …, T_d over a product X₁ × … × X_d and the map 𝔣 from
//! clopen sets of X^(n) to sets of points of T^(n) = T₁ × … × Tₙ.
//!
//! A member of Tᵢ is a set A ⊆ X^(i) meeting the fiber over every t ∈ X^(i−1).
//! It is stored as one nonempty mask per fiber; Tᵢ is enumerated as an
//! odometer over those masks with the first fiber most significant and each
//! mask counting up from 1.

use fixedbitset::FixedBitSet;

use super::pullback::UnionMap;
use crate::algebra::{CylinderSet, CylinderSpace, FiniteAlgebra, Prefix, DEFAULT_MAX_LEAVES};
use crate::error::{Error, Result};

/// Largest |Tᵢ| accepted when building levels.
pub const MAX_LEVEL_SIZE: usize = DEFAULT_MAX_LEAVES;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelSystem {
    x: CylinderSpace,
    t: CylinderSpace,
    /// |X^(i−1)| for level i.
    parents: Vec<usize>,
}

/// Levels T₁..T_depth for the given |Xᵢ|.
pub fn build_levels(branching: &[usize], depth: usize) -> Result<LevelSystem> {
    if depth == 0 || depth > branching.len() {
        return Err(Error::Range(format!("depth must lie in [1, {}]", branching.len())));
    }
    let branching = &branching[..depth];
    if branching.iter().any(|&b| b == 0 || b > 20) {
        return Err(Error::Range("each |X_i| must lie in [1, 20]".into()));
    }
    let mut parents = Vec::with_capacity(depth);
    let mut sizes = Vec::with_capacity(depth);
    let mut p: usize = 1;
    for &b in branching {
        let radix = (1usize << b) - 1;
        let size = u32::try_from(p)
            .ok()
            .and_then(|e| radix.checked_pow(e))
            .filter(|&s| s <= MAX_LEVEL_SIZE)
            .ok_or_else(|| Error::SizeCap(format!("level {} has more than {MAX_LEVEL_SIZE} members", sizes.len() + 1)))?;
        parents.push(p);
        sizes.push(size);
        p = p.checked_mul(b).ok_or_else(|| Error::SizeCap("product space too large".into()))?;
    }
    Ok(LevelSystem { x: CylinderSpace::new(branching.to_vec())?, t: CylinderSpace::new(sizes)?, parents })
}

impl LevelSystem {
    pub fn depth(&self) -> usize {
        self.x.max_depth()
    }

    /// X₁ × … × X_d.
    pub fn x_space(&self) -> &CylinderSpace {
        &self.x
    }

    /// T₁ × … × T_d, with member v of Tᵢ as the 1-based value v.
    pub fn t_space(&self) -> &CylinderSpace {
        &self.t
    }

    /// |Tᵢ|, 1-based level.
    pub fn level_size(&self, level: usize) -> usize {
        self.t.branching(level)
    }

    fn check_level(&self, level: usize) -> Result<()> {
        if level == 0 || level > self.depth() {
            return Err(Error::Range(format!("level {level} outside [1, {}]", self.depth())));
        }
        Ok(())
    }

    /// Whether member `value` (1-based) of T_level contains the depth-`level` leaf.
    fn contains(&self, level: usize, value: usize, leaf: usize) -> bool {
        let b = self.x.branching(level);
        let radix = (1usize << b) - 1;
        let (parent, bit) = (leaf / b, leaf % b);
        let shift = self.parents[level - 1] - 1 - parent;
        let digit = (value - 1) / radix.pow(shift as u32) % radix;
        (digit + 1) >> bit & 1 == 1
    }

    /// Member `value` of T_level as a set of depth-`level` leaves of X.
    pub fn level_member(&self, level: usize, value: usize) -> Result<CylinderSet> {
        self.check_level(level)?;
        if value == 0 || value > self.level_size(level) {
            return Err(Error::Range(format!("value {value} outside [1, {}]", self.level_size(level))));
        }
        let count = self.x.leaf_count(level)?;
        self.x.from_leaves(level, (0..count).filter(|&l| self.contains(level, value, l)))
    }

    /// The 1-based value of a depth-`level` set, if it meets every fiber.
    pub fn level_value(&self, set: &CylinderSet) -> Result<usize> {
        let level = set.depth();
        self.check_level(level)?;
        let b = self.x.branching(level);
        let radix = (1usize << b) - 1;
        let mut index = 0usize;
        for parent in 0..self.parents[level - 1] {
            let mask = (0..b).filter(|&bit| set.leaves().contains(parent * b + bit)).fold(0, |m, bit| m | 1 << bit);
            if mask == 0 {
                return Err(Error::Precondition(format!("the set misses the fiber over parent {}", parent + 1)));
            }
            index = index * radix + (mask - 1);
        }
        Ok(index + 1)
    }

    fn point_leaves(&self, point: &[usize]) -> Result<Vec<usize>> {
        (1..=point.len()).map(|i| self.x.encode(&point[..i])).collect()
    }

    /// All leaves of the depth-n T-space whose i-th value satisfies `keep(i, v)`.
    fn product(&self, n: usize, keep: impl Fn(usize, usize) -> bool) -> Result<CylinderSet> {
        let allowed: Vec<Vec<usize>> =
            (1..=n).map(|i| (1..=self.level_size(i)).filter(|&v| keep(i, v)).collect()).collect();
        let mut leaves = vec![0usize];
        for (i, vals) in allowed.iter().enumerate() {
            let b = self.t.branching(i + 1);
            leaves = leaves.iter().flat_map(|&l| vals.iter().map(move |&v| l * b + v - 1)).collect();
        }
        self.t.from_leaves(n, leaves)
    }

    /// 𝔣(t) = {f ∈ T^(n) : t↾[i] ∈ f(i) for all i ≤ n} for t ∈ X^(n).
    pub fn explicit_f(&self, t: &Prefix) -> Result<CylinderSet> {
        if !t.is_initial_segment() {
            return Err(Error::InvalidPrefix("the point must assign coordinates 1..n".into()));
        }
        let n = t.len();
        if n > self.depth() {
            return Err(Error::DepthTooShallow { depth: self.depth(), coordinate: n });
        }
        self.t.leaf_count(n)?;
        let leaves = self.point_leaves(&t.values())?;
        self.product(n, |i, v| self.contains(i, v, leaves[i - 1]))
    }

    /// 𝔣 of a clopen set: the union of 𝔣(t) over its points at its depth.
    pub fn explicit_f_set(&self, a: &CylinderSet) -> Result<CylinderSet> {
        if a.space() != &self.x {
            return Err(Error::Precondition("the set lives in a different space".into()));
        }
        let mut out = self.t.empty(a.depth())?;
        for p in a.points() {
            out = out.union(&self.explicit_f(&Prefix::from_values(&p)?)?)?;
        }
        Ok(out)
    }

    /// {t ∈ X^(n) : t↾[i] ∈ f(i) for all i} for f = (f(1), …, f(n)).
    pub fn generators_of(&self, f: &[usize]) -> Result<CylinderSet> {
        let n = f.len();
        if n > self.depth() {
            return Err(Error::DepthTooShallow { depth: self.depth(), coordinate: n });
        }
        for (i, &v) in f.iter().enumerate() {
            if v == 0 || v > self.level_size(i + 1) {
                return Err(Error::Range(format!("value {v} outside T_{}", i + 1)));
            }
        }
        let mut out = self.x.empty(n)?;
        for p in self.x.full(n)?.points() {
            let leaves = self.point_leaves(&p)?;
            if (1..=n).all(|i| self.contains(i, f[i - 1], leaves[i - 1])) {
                out = out.union(&self.x.from_leaves(n, [leaves[n - 1]])?)?;
            }
        }
        Ok(out)
    }

    /// An f ∈ T^(n) whose generators are exactly `a` (n = depth of `a`):
    /// f(i) is the projection of `a` plus the least child of every parent the
    /// projection misses.
    pub fn f_generated_by(&self, a: &CylinderSet) -> Result<Vec<usize>> {
        if a.space() != &self.x {
            return Err(Error::Precondition("the set lives in a different space".into()));
        }
        if a.is_empty() {
            return Err(Error::Precondition("no point of T^(n) has an empty generator set".into()));
        }
        let n = a.depth();
        let points: Vec<Vec<usize>> = a.points().collect();
        let mut f = Vec::with_capacity(n);
        let mut previous: Option<FixedBitSet> = None;
        for i in 1..=n {
            let b = self.x.branching(i);
            let mut projection = FixedBitSet::with_capacity(self.x.leaf_count(i)?);
            for p in &points {
                projection.insert(self.x.encode(&p[..i])?);
            }
            let mut leaves = projection.clone();
            if let Some(prev) = &previous {
                for parent in 0..prev.len() {
                    if !prev.contains(parent) {
                        leaves.insert(parent * b);
                    }
                }
            }
            f.push(self.level_value(&self.x.from_bitset(i, leaves)?)?);
            previous = Some(projection);
        }
        Ok(f)
    }

    /// 𝔣 on the algebra of subsets of X^(n), atom t ↦ 𝔣(t).
    pub fn union_map(&self, n: usize) -> Result<UnionMap> {
        let count = self.x.leaf_count(n)?;
        let source = FiniteAlgebra::new(count)?;
        let images = (0..count)
            .map(|l| Ok(self.explicit_f(&Prefix::from_values(&self.x.decode(n, l))?)?.leaves().clone()))
            .collect::<Result<Vec<_>>>()?;
        UnionMap::new(source, self.t.leaf_count(n)?, images)
    }
}
