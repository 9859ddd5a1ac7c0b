//! Exact minimum-weight covers by D-sets from a restricted universe.

use std::cmp::Ordering;
use std::collections::HashMap;

use fixedbitset::FixedBitSet;
use num_bigint::BigUint;
use num_traits::ToPrimitive;
use rayon::prelude::*;

use super::dset::DSet;
use super::schedule::Schedule;
use super::weight::{compare_with_cap, Comparison, ExactWeight, DEFAULT_PRECISION_CAP};
use crate::algebra::CylinderSet;
use crate::error::{Error, Result};
use crate::rational::Rational;

/// Largest number of leaves the search works over.
pub const SEARCH_LEAF_CAP: usize = 1 << 16;

/// The finite part of the D-set family used by the search: index sets inside
/// [depth] and levels k ≤ k_max.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CoverUniverse {
    pub depth: usize,
    pub k_max: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinCover {
    /// Members sorted by (index set, values).
    pub cover: Vec<DSet>,
    pub weight: ExactWeight,
}

/// Effective weight of each index-set size and exact comparison of sums of them.
struct Weights {
    /// `class[s]` for s = 1..=depth; `None` when no allowed level admits size s.
    class: Vec<Option<ExactWeight>>,
    lo: Vec<Rational>,
    hi: Vec<Rational>,
    approx: Vec<f64>,
    /// Outward-rounded float bounds per size, when both are normal floats.
    float_lo: Vec<f64>,
    float_hi: Vec<f64>,
    floats_ok: bool,
    /// Allowed sizes ordered by weight, ties by size.
    by_weight: Vec<usize>,
    cap: u64,
}

impl Weights {
    fn new(schedule: &Schedule, universe: &CoverUniverse, cap: u64) -> Result<Self> {
        let k_max = universe.k_max.min(schedule.k_max());
        let d = universe.depth;
        let mut class = vec![None; d + 1];
        for (s, slot) in class.iter_mut().enumerate().skip(1) {
            let n = BigUint::from(s);
            let Ok(first) = schedule.delta(&n) else { continue };
            let mut best: Option<ExactWeight> = None;
            for k in first..=k_max {
                let w = schedule.level_weight(k, &n);
                best = Some(match best {
                    None => w,
                    Some(b) => match compare_with_cap(&w, &b, cap).0 {
                        Comparison::Less => w,
                        Comparison::Undecided { bits } => return Err(Error::Undecided { bits }),
                        _ => b,
                    },
                });
            }
            *slot = best;
        }
        let mut lo = vec![Rational::default(); d + 1];
        let mut hi = vec![Rational::default(); d + 1];
        let mut approx = vec![f64::INFINITY; d + 1];
        for s in 1..=d {
            if let Some(w) = &class[s] {
                let (l, h) = w.bounds(192);
                lo[s] = l;
                hi[s] = h;
                approx[s] = w.approx_f64();
            }
        }
        let mut float_lo = vec![0.0; d + 1];
        let mut float_hi = vec![0.0; d + 1];
        let mut floats_ok = true;
        for s in 1..=d {
            if class[s].is_some() {
                let (l, h) = (lo[s].to_f64().unwrap_or(f64::NAN), hi[s].to_f64().unwrap_or(f64::NAN));
                // to_f64 rounds to nearest; widen by a few ulps to stay outward
                float_lo[s] = l * (1.0 - 1e-14);
                float_hi[s] = h * (1.0 + 1e-14);
                floats_ok &= l.is_normal() && h.is_normal() && l > 1e-250 && h < 1e250;
            }
        }
        let mut this =
            Weights { class, lo, hi, approx, float_lo, float_hi, floats_ok, by_weight: Vec::new(), cap };
        let mut sizes: Vec<usize> = (1..=d).filter(|&s| this.class[s].is_some()).collect();
        let mut err = None;
        sizes.sort_by(|&a, &b| {
            let mut va = vec![0; d + 1];
            let mut vb = vec![0; d + 1];
            va[a] = 1;
            vb[b] = 1;
            match this.cmp(&va, &vb) {
                Ok(o) => o.then(a.cmp(&b)),
                Err(e) => {
                    err = Some(e);
                    a.cmp(&b)
                }
            }
        });
        if let Some(e) = err {
            return Err(e);
        }
        this.by_weight = sizes;
        Ok(this)
    }

    fn allowed(&self, s: usize) -> bool {
        self.class.get(s).is_some_and(Option::is_some)
    }

    fn total(&self, counts: &[u32]) -> ExactWeight {
        let mut sum = ExactWeight::zero();
        for (s, &c) in counts.iter().enumerate() {
            if c > 0 {
                sum = sum.add(&self.class[s].as_ref().expect("allowed size").scale_int(c.into()));
            }
        }
        sum
    }

    fn cmp(&self, a: &[u32], b: &[u32]) -> Result<Ordering> {
        if a == b {
            return Ok(Ordering::Equal);
        }
        if a.iter().zip(b).all(|(x, y)| x <= y) {
            return Ok(Ordering::Less);
        }
        if a.iter().zip(b).all(|(x, y)| x >= y) {
            return Ok(Ordering::Greater);
        }
        if self.floats_ok {
            // each sum has at most ~64 roundings of relative size 2^-53
            let fsum = |v: &[u32], table: &[f64]| -> f64 {
                v.iter().enumerate().map(|(s, &c)| if c > 0 { f64::from(c) * table[s] } else { 0.0 }).sum()
            };
            let slack = 1e-12;
            let (a_lo, a_hi) = (fsum(a, &self.float_lo) * (1.0 - slack), fsum(a, &self.float_hi) * (1.0 + slack));
            let (b_lo, b_hi) = (fsum(b, &self.float_lo) * (1.0 - slack), fsum(b, &self.float_hi) * (1.0 + slack));
            if a_hi < b_lo {
                return Ok(Ordering::Less);
            }
            if a_lo > b_hi {
                return Ok(Ordering::Greater);
            }
        }
        let bound = |v: &[u32], table: &[Rational]| -> Rational {
            v.iter()
                .enumerate()
                .filter(|(_, &c)| c > 0)
                .map(|(s, &c)| &table[s] * Rational::from_integer(c.into()))
                .sum()
        };
        if bound(a, &self.hi) < bound(b, &self.lo) {
            return Ok(Ordering::Less);
        }
        if bound(a, &self.lo) > bound(b, &self.hi) {
            return Ok(Ordering::Greater);
        }
        match compare_with_cap(&self.total(a), &self.total(b), self.cap).0 {
            Comparison::Undecided { bits } => Err(Error::Undecided { bits }),
            c => Ok(c.ordering().expect("decided")),
        }
    }
}

/// A D-set as a coordinate mask (bit n−1 for coordinate n) and 0-based values.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Member {
    coords: u32,
    values: Vec<u8>,
}

impl Member {
    fn to_dset(&self) -> DSet {
        let excluded = (0..32)
            .filter(|n| self.coords >> n & 1 == 1)
            .zip(&self.values)
            .map(|(n, &v)| (n as usize + 1, v as usize + 1))
            .collect();
        DSet::new(excluded).expect("members have nonempty index sets")
    }
}

#[derive(Debug, Clone)]
struct Solution {
    counts: Vec<u32>,
    members: Vec<Member>,
}

/// Acceptance rule for new solutions.
#[derive(Debug, Clone)]
enum Bound {
    /// Accept only strictly lighter families.
    Below(Vec<u32>),
    /// Accept families no heavier than this (a weight without a witness).
    AtMost(Vec<u32>),
}

struct Context<'a> {
    d: usize,
    branching: Vec<usize>,
    /// `hits[n][v]`: leaves whose coordinate n+1 takes value v+1.
    hits: Vec<Vec<FixedBitSet>>,
    /// Symmetry class of every value at every coordinate.
    class_of: Vec<Vec<usize>>,
    weights: &'a Weights,
    /// Coordinate masks of allowed size, by (size, mask).
    index_sets: Vec<u32>,
}

struct Dfs<'a, 'b> {
    ctx: &'b Context<'a>,
    bound: Bound,
    best: Option<Solution>,
    seen: HashMap<FixedBitSet, Vec<Vec<u32>>>,
}

impl Context<'_> {
    fn missing_value(&self, uncovered: &FixedBitSet, n: usize) -> Option<usize> {
        (0..self.branching[n]).find(|&v| uncovered.is_disjoint(&self.hits[n][v]))
    }

    /// The lightest single member covering all of `uncovered`, if any.
    fn one_set_completion(&self, uncovered: &FixedBitSet) -> Option<Member> {
        let missing: Vec<(usize, usize)> = (0..self.d)
            .filter_map(|n| self.missing_value(uncovered, n).map(|v| (n, v)))
            .collect();
        let size = *self.weights.by_weight.iter().find(|&&s| s <= missing.len())?;
        let chosen = &missing[..size];
        Some(Member {
            coords: chosen.iter().fold(0, |m, &(n, _)| m | 1 << n),
            values: chosen.iter().map(|&(_, v)| v as u8).collect(),
        })
    }

    fn uncovered_after(&self, uncovered: &FixedBitSet, m: &Member) -> FixedBitSet {
        let mut hit = FixedBitSet::with_capacity(uncovered.len());
        for (n, &v) in (0..self.d).filter(|n| m.coords >> n & 1 == 1).zip(&m.values) {
            hit.union_with(&self.hits[n][v as usize]);
        }
        hit.intersect_with(uncovered);
        hit
    }
}

/// Steps an odometer whose digit i runs below `len(i)`; false once it wraps.
fn advance(pick: &mut [usize], len: impl Fn(usize) -> usize) -> bool {
    for i in (0..pick.len()).rev() {
        pick[i] += 1;
        if pick[i] < len(i) {
            return true;
        }
        pick[i] = 0;
    }
    false
}

fn with_member(counts: &[u32], size: usize, times: u32) -> Vec<u32> {
    let mut c = counts.to_vec();
    c[size] += times;
    c
}

impl<'a, 'b> Dfs<'a, 'b> {
    fn admits(&self, counts: &[u32]) -> Result<bool> {
        Ok(match &self.bound {
            Bound::Below(b) => self.ctx.weights.cmp(counts, b)? == Ordering::Less,
            Bound::AtMost(b) => self.ctx.weights.cmp(counts, b)? != Ordering::Greater,
        })
    }

    fn accept(&mut self, counts: Vec<u32>, members: Vec<Member>) {
        self.bound = Bound::Below(counts.clone());
        self.best = Some(Solution { counts, members });
    }

    fn visit(&mut self, uncovered: &FixedBitSet, counts: &[u32], used: &[u64], members: &mut Vec<Member>) -> Result<()> {
        let ctx = self.ctx;
        if let Some(prior) = self.seen.get(uncovered) {
            if prior.iter().any(|p| p.iter().zip(counts).all(|(a, b)| a <= b)) {
                return Ok(());
            }
        }
        self.seen.entry(uncovered.clone()).or_default().push(counts.to_vec());

        if let Some(last) = ctx.one_set_completion(uncovered) {
            let size = last.coords.count_ones() as usize;
            let total = with_member(counts, size, 1);
            if self.admits(&total)? {
                let mut family = members.clone();
                family.push(last);
                self.accept(total, family);
            }
        }
        let lightest = ctx.weights.by_weight[0];
        if !self.admits(&with_member(counts, lightest, 2))? {
            return Ok(());
        }
        let first = uncovered.minimum().expect("nonempty");
        let x: Vec<usize> = (0..ctx.d).map(|n| (0..ctx.branching[n]).find(|&v| ctx.hits[n][v].contains(first)).unwrap()).collect();
        let candidates: Vec<Vec<u8>> = (0..ctx.d).map(|n| self.candidates(n, x[n], used[n])).collect();
        let mut size_ok: Vec<Option<bool>> = vec![None; ctx.d + 1];
        for &mask in &ctx.index_sets {
            let size = mask.count_ones() as usize;
            let ok = match size_ok[size] {
                Some(ok) => ok,
                None => {
                    let mut next = with_member(counts, size, 1);
                    next[lightest] += 1;
                    let ok = self.admits(&next)?;
                    size_ok[size] = Some(ok);
                    ok
                }
            };
            if !ok {
                continue;
            }
            let coords: Vec<usize> = (0..ctx.d).filter(|n| mask >> n & 1 == 1).collect();
            if coords.iter().any(|&n| candidates[n].is_empty()) {
                continue;
            }
            let mut pick = vec![0usize; coords.len()];
            loop {
                let member = Member {
                    coords: mask,
                    values: coords.iter().zip(&pick).map(|(&n, &i)| candidates[n][i]).collect(),
                };
                let rest = ctx.uncovered_after(uncovered, &member);
                if !rest.is_clear() {
                    let mut used_next = used.to_vec();
                    for (&n, &v) in coords.iter().zip(&member.values) {
                        used_next[n] |= 1 << v;
                    }
                    members.push(member);
                    self.visit(&rest, &with_member(counts, size, 1), &used_next, members)?;
                    members.pop();
                    // the bound may have tightened
                    if !self.admits(&with_member(&with_member(counts, size, 1), lightest, 1))? {
                        break;
                    }
                }
                if !advance(&mut pick, |i| candidates[coords[i]].len()) {
                    break;
                }
            }
        }
        Ok(())
    }

    /// Values worth excluding at coordinate n: every value already used there
    /// and one unused representative per symmetry class, never x's own value.
    fn candidates(&self, n: usize, own: usize, used: u64) -> Vec<u8> {
        let ctx = self.ctx;
        let mut seen_class = vec![false; ctx.branching[n]];
        let mut out = Vec::new();
        for v in 0..ctx.branching[n] {
            if v == own {
                continue;
            }
            if used >> v & 1 == 1 {
                out.push(v as u8);
            } else {
                let c = ctx.class_of[n][v];
                if !seen_class[c] {
                    seen_class[c] = true;
                    out.push(v as u8);
                }
            }
        }
        out
    }
}

/// Partition of the values at each coordinate into classes whose
/// transpositions leave `target` unchanged.
fn symmetry_classes(target: &FixedBitSet, branching: &[usize], spans: &[usize]) -> Vec<Vec<usize>> {
    let total = target.len();
    branching
        .iter()
        .enumerate()
        .map(|(n, &b)| {
            let span = spans[n];
            let swappable = |r: usize, v: usize| {
                let shift = (v - r) * span;
                (0..total)
                    .filter(|l| (l / span) % b == r)
                    .all(|l| target.contains(l) == target.contains(l + shift))
            };
            let mut reps: Vec<usize> = Vec::new();
            (0..b)
                .map(|v| {
                    reps.iter().position(|&r| swappable(r, v)).unwrap_or_else(|| {
                        reps.push(v);
                        reps.len() - 1
                    })
                })
                .collect::<Vec<_>>()
        })
        .collect()
}

fn greedy_bound(ctx: &Context, target: &FixedBitSet) -> Result<Vec<u32>> {
    let mut uncovered = target.clone();
    let mut counts = vec![0u32; ctx.d + 1];
    while !uncovered.is_clear() {
        let mut best: Option<(f64, Member)> = None;
        for &mask in &ctx.index_sets {
            let size = mask.count_ones() as usize;
            let coords: Vec<usize> = (0..ctx.d).filter(|n| mask >> n & 1 == 1).collect();
            let values: Vec<u8> = coords
                .iter()
                .map(|&n| {
                    (0..ctx.branching[n])
                        .min_by_key(|&v| uncovered.intersection(&ctx.hits[n][v]).count())
                        .unwrap() as u8
                })
                .collect();
            let member = Member { coords: mask, values };
            let rest = ctx.uncovered_after(&uncovered, &member);
            let gain = uncovered.count_ones(..) - rest.count_ones(..);
            let score = gain as f64 / ctx.weights.approx[size];
            if gain > 0 && best.as_ref().is_none_or(|(s, _)| score > *s) {
                best = Some((score, member));
            }
        }
        let (_, member) = best.ok_or_else(|| Error::Infeasible("the universe cannot cover the target".into()))?;
        uncovered = ctx.uncovered_after(&uncovered, &member);
        counts[member.coords.count_ones() as usize] += 1;
    }
    Ok(counts)
}

pub fn min_weight_cover(schedule: &Schedule, universe: CoverUniverse, target: &CylinderSet) -> Result<MinCover> {
    min_weight_cover_with_cap(schedule, universe, target, DEFAULT_PRECISION_CAP)
}

/// Exact minimum of Σ w over covers of `target` by members of the universe.
/// The witness is the first minimiser in a fixed search order, so it does not
/// depend on how many threads run the root subtrees.
pub fn min_weight_cover_with_cap(
    schedule: &Schedule,
    universe: CoverUniverse,
    target: &CylinderSet,
    precision_cap: u64,
) -> Result<MinCover> {
    let space = target.space();
    let d = universe.depth;
    if d == 0 || d > 31 {
        return Err(Error::Range("universe depth must lie in [1, 31]".into()));
    }
    if universe.k_max == 0 {
        return Err(Error::Range("k_max must be at least 1".into()));
    }
    let canonical = target.canonical();
    if canonical.depth() > d {
        return Err(Error::DepthTooShallow { depth: d, coordinate: canonical.depth() });
    }
    let leaves = space.leaf_count(d)?;
    if leaves > SEARCH_LEAF_CAP {
        return Err(Error::DepthCap { depth: d, leaves: leaves as u128, cap: SEARCH_LEAF_CAP });
    }
    let branching: Vec<usize> = (1..=d).map(|n| space.branching(n)).collect();
    if branching.iter().any(|&b| b > 64) {
        return Err(Error::SizeCap("search supports at most 64 values per coordinate".into()));
    }
    let target = canonical.expand_to(d)?;
    if target.is_empty() {
        return Ok(MinCover { cover: Vec::new(), weight: ExactWeight::zero() });
    }

    let weights = Weights::new(schedule, &universe, precision_cap)?;
    if weights.by_weight.is_empty() {
        return Err(Error::Infeasible("no index-set size is allowed by the universe".into()));
    }
    let spans: Vec<usize> = (0..d).map(|n| branching[n + 1..].iter().product()).collect();
    let hits: Vec<Vec<FixedBitSet>> = (0..d)
        .map(|n| {
            (0..branching[n])
                .map(|v| {
                    let mut set = FixedBitSet::with_capacity(leaves);
                    for l in 0..leaves {
                        if (l / spans[n]) % branching[n] == v {
                            set.insert(l);
                        }
                    }
                    set
                })
                .collect()
        })
        .collect();
    let mut index_sets: Vec<u32> =
        (1u32..1 << d).filter(|m| weights.allowed(m.count_ones() as usize)).collect();
    index_sets.sort_by_key(|m| (m.count_ones(), *m));
    let ctx = Context {
        d,
        class_of: symmetry_classes(target.leaves(), &branching, &spans),
        branching,
        hits,
        weights: &weights,
        index_sets,
    };

    let root = target.leaves().clone();
    let zero = vec![0u32; d + 1];
    let root_member = ctx.one_set_completion(&root);
    let (bound, root_solution) = match &root_member {
        Some(m) => {
            let counts = with_member(&zero, m.coords.count_ones() as usize, 1);
            (Bound::Below(counts.clone()), Some(Solution { counts, members: vec![m.clone()] }))
        }
        None => (Bound::AtMost(greedy_bound(&ctx, &root)?), None),
    };

    // root children, explored independently and merged in order
    let first = root.minimum().expect("nonempty");
    let x: Vec<usize> = (0..d).map(|n| (0..ctx.branching[n]).find(|&v| ctx.hits[n][v].contains(first)).unwrap()).collect();
    let probe = Dfs { ctx: &ctx, bound: bound.clone(), best: None, seen: HashMap::new() };
    let candidates: Vec<Vec<u8>> = (0..d).map(|n| probe.candidates(n, x[n], 0)).collect();
    let mut children: Vec<Member> = Vec::new();
    for &mask in &ctx.index_sets {
        let coords: Vec<usize> = (0..d).filter(|n| mask >> n & 1 == 1).collect();
        let mut combos: Vec<Vec<u8>> = vec![Vec::new()];
        for &n in &coords {
            combos = combos
                .into_iter()
                .flat_map(|c| candidates[n].iter().map(move |&v| [c.clone(), vec![v]].concat()))
                .collect();
        }
        for values in combos {
            children.push(Member { coords: mask, values });
        }
    }
    let results: Vec<Result<Option<Solution>>> = children
        .par_iter()
        .map(|member| {
            let mut dfs = Dfs { ctx: &ctx, bound: bound.clone(), best: None, seen: HashMap::new() };
            let size = member.coords.count_ones() as usize;
            let counts = with_member(&zero, size, 1);
            let mut probe_counts = counts.clone();
            probe_counts[ctx.weights.by_weight[0]] += 1;
            if !dfs.admits(&probe_counts)? {
                return Ok(None);
            }
            let rest = ctx.uncovered_after(&root, member);
            if rest.is_clear() {
                return Ok(None);
            }
            let mut used = vec![0u64; d];
            for (n, &v) in (0..d).filter(|n| member.coords >> n & 1 == 1).zip(&member.values) {
                used[n] |= 1 << v;
            }
            let mut members = vec![member.clone()];
            dfs.visit(&rest, &counts, &used, &mut members)?;
            Ok(dfs.best)
        })
        .collect();

    let mut best = root_solution;
    for r in results {
        if let Some(sol) = r? {
            let better = match &best {
                None => true,
                Some(b) => weights.cmp(&sol.counts, &b.counts)? == Ordering::Less,
            };
            if better {
                best = Some(sol);
            }
        }
    }
    let best = best.ok_or_else(|| Error::Infeasible("the universe cannot cover the target".into()))?;
    let mut cover: Vec<DSet> = best.members.iter().map(Member::to_dset).collect();
    cover.sort_by_key(|x| (x.index_set().into_iter().collect::<Vec<_>>(), x.excluded().values().copied().collect::<Vec<_>>()));
    Ok(MinCover { weight: weights.total(&best.counts), cover })
}
