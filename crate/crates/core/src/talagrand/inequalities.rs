//! Sampled verification of the weight inequalities behind the closed forms.
//!
//! For fixed levels each side is c · n^e, so the sign of the difference
//! changes at most once along a parameter; endpoints plus a log-spaced grid
//! catch every crossing the grid resolves. Ranges of at most 64 points are
//! checked exhaustively.

use std::collections::BTreeSet;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use serde_json::{json, Map, Value};

use super::schedule::Schedule;
use super::weight::{compare_with_cap, Comparison, ExactWeight, Method};
use crate::error::{Error, Result};
use crate::rational::Rational;

/// Ranges up to this size are enumerated in full.
pub const EXHAUSTIVE_RANGE: u64 = 64;

/// The four inequalities, by what they compare.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Inequality {
    /// w_k(n) < w_{k+1}(n): a higher level never gives a lighter set.
    LevelIncrease,
    /// w_{δ1}(k) ≥ 2^{-δ2}: a set is never lighter than a deeper level's floor.
    LevelFloor,
    /// N·w_{δ1}(N−1) ≤ M·w_{δ2}(M−1): small rectangles are lightest.
    RectangleOrder,
    /// w_{δ1}(k) ≤ N·w_{δ2}(N+k−1): a spike is no heavier than a rectangle.
    SpikeBelowRectangle,
}

impl Inequality {
    pub const ALL: [Inequality; 4] =
        [Inequality::LevelIncrease, Inequality::LevelFloor, Inequality::RectangleOrder, Inequality::SpikeBelowRectangle];

    pub fn name(self) -> &'static str {
        match self {
            Inequality::LevelIncrease => "level-increase",
            Inequality::LevelFloor => "level-floor",
            Inequality::RectangleOrder => "rectangle-order",
            Inequality::SpikeBelowRectangle => "spike-below-rectangle",
        }
    }

    fn holds(self, c: Comparison) -> bool {
        match self {
            Inequality::LevelIncrease => c == Comparison::Less,
            Inequality::LevelFloor => matches!(c, Comparison::Greater | Comparison::Equal),
            Inequality::RectangleOrder | Inequality::SpikeBelowRectangle => {
                matches!(c, Comparison::Less | Comparison::Equal)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub params: Vec<(&'static str, BigUint)>,
    pub lhs: ExactWeight,
    pub rhs: ExactWeight,
    pub outcome: Comparison,
}

impl Instance {
    pub fn to_json(&self, cap: u64) -> Value {
        let params: Map<String, Value> =
            self.params.iter().map(|(k, v)| (k.to_string(), Value::String(v.to_string()))).collect();
        json!({
            "params": params,
            "lhs": self.lhs.to_json(cap),
            "rhs": self.rhs.to_json(cap),
            "outcome": outcome_name(self.outcome),
        })
    }
}

fn outcome_name(c: Comparison) -> &'static str {
    match c {
        Comparison::Less => "less",
        Comparison::Equal => "equal",
        Comparison::Greater => "greater",
        Comparison::Undecided { .. } => "undecided",
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct MethodCounts {
    pub symbolic: usize,
    pub exact_single_term: usize,
    pub interval: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InequalityReport {
    pub inequality: Inequality,
    pub checked: usize,
    pub methods: MethodCounts,
    /// First instance that fails; checking stops there.
    pub failure: Option<Instance>,
    pub undecided: Vec<Instance>,
}

impl InequalityReport {
    pub fn passed(&self) -> bool {
        self.failure.is_none() && self.undecided.is_empty()
    }

    pub fn to_json(&self, cap: u64) -> Value {
        json!({
            "inequality": self.inequality.name(),
            "passed": self.passed(),
            "checked": self.checked,
            "methods": {
                "symbolic": self.methods.symbolic,
                "exact-single-term": self.methods.exact_single_term,
                "interval": self.methods.interval,
            },
            "failure": self.failure.as_ref().map(|i| i.to_json(cap)),
            "undecided": self.undecided.iter().map(|i| i.to_json(cap)).collect::<Vec<_>>(),
        })
    }
}

/// Sample points of [lo, hi]: all of them for short ranges, otherwise the
/// endpoints and up to `samples` powers of two spread evenly in log scale.
pub fn sample_grid(lo: &BigUint, hi: &BigUint, samples: usize) -> Vec<BigUint> {
    if lo > hi {
        return Vec::new();
    }
    let width = hi - lo;
    if width < BigUint::from(EXHAUSTIVE_RANGE) {
        let w = width.to_u64().unwrap();
        return (0..=w).map(|i| lo + i).collect();
    }
    let mut out = BTreeSet::from([lo.clone(), hi.clone()]);
    let first = if lo.is_one() { 0 } else { (lo - 1u32).bits() };
    let last = hi.bits() - 1;
    if first <= last && samples > 0 {
        let span = last - first;
        let count = (samples as u64).min(span + 1);
        for i in 0..count {
            let e = if count == 1 { first } else { first + span * i / (count - 1) };
            let p = BigUint::one() << e;
            if &p >= lo && &p <= hi {
                out.insert(p);
            }
        }
    }
    out.into_iter().collect()
}

struct Checker<'a> {
    schedule: &'a Schedule,
    cap: u64,
    report: InequalityReport,
}

impl Checker<'_> {
    /// Records one instance; false once checking should stop.
    fn check(&mut self, params: Vec<(&'static str, BigUint)>, lhs: ExactWeight, rhs: ExactWeight) -> bool {
        let (outcome, method) = compare_with_cap(&lhs, &rhs, self.cap);
        self.report.checked += 1;
        match method {
            Method::Symbolic => self.report.methods.symbolic += 1,
            Method::ExactSingleTerm => self.report.methods.exact_single_term += 1,
            Method::Interval { .. } => self.report.methods.interval += 1,
        }
        let instance = Instance { params, lhs, rhs, outcome };
        if let Comparison::Undecided { .. } = outcome {
            self.report.undecided.push(instance);
            return true;
        }
        if !self.report.inequality.holds(outcome) {
            self.report.failure = Some(instance);
            return false;
        }
        true
    }

    fn w(&self, k: usize, n: &BigUint) -> ExactWeight {
        self.schedule.level_weight(k, n)
    }

    fn floor(k: usize) -> ExactWeight {
        ExactWeight::pow2(&Rational::from_integer((-(k as i64)).into()))
    }
}

fn scaled(w: ExactWeight, n: &BigUint) -> ExactWeight {
    w.scale(&Rational::from_integer(n.clone().into()))
}

/// Checks each inequality over levels 1..=k_max (capped by the schedule).
pub fn verify_inequalities(schedule: &Schedule, k_max: usize, samples: usize, cap: u64) -> Result<Vec<InequalityReport>> {
    if k_max == 0 || k_max > schedule.k_max() {
        return Err(Error::Range(format!("k_max must lie in [1, {}]", schedule.k_max())));
    }
    Ok(Inequality::ALL.iter().map(|&i| verify_one(schedule, i, k_max, samples, cap)).collect())
}

pub fn verify_one(schedule: &Schedule, inequality: Inequality, k_max: usize, samples: usize, cap: u64) -> InequalityReport {
    let mut c = Checker {
        schedule,
        cap,
        report: InequalityReport {
            inequality,
            checked: 0,
            methods: MethodCounts::default(),
            failure: None,
            undecided: Vec::new(),
        },
    };
    let one = BigUint::one();
    let eta = |k: usize| schedule.eta(k).to_biguint();
    let b = |k: usize| BigUint::from(k);
    'outer: {
        match inequality {
            Inequality::LevelIncrease => {
                for k in 1..k_max {
                    for n in sample_grid(&one, &eta(k), samples) {
                        let (l, r) = (c.w(k, &n), c.w(k + 1, &n));
                        if !c.check(vec![("k", b(k)), ("n", n)], l, r) {
                            break 'outer;
                        }
                    }
                }
            }
            Inequality::LevelFloor => {
                for d1 in 1..=k_max {
                    for d2 in d1..=k_max {
                        for k in sample_grid(&one, &eta(d1), samples) {
                            let l = c.w(d1, &k);
                            if !c.check(vec![("delta1", b(d1)), ("delta2", b(d2)), ("k", k)], l, Checker::floor(d2)) {
                                break 'outer;
                            }
                        }
                    }
                }
            }
            Inequality::RectangleOrder => {
                for d1 in 1..=k_max {
                    for d2 in d1..=k_max {
                        for n1 in sample_grid(&one, &eta(d1), samples) {
                            let lhs = scaled(c.w(d1, &n1), &(&n1 + 1u32));
                            for m1 in sample_grid(&n1, &eta(d2), samples) {
                                let rhs = scaled(c.w(d2, &m1), &(&m1 + 1u32));
                                let params =
                                    vec![("delta1", b(d1)), ("delta2", b(d2)), ("N", &n1 + 1u32), ("M", &m1 + 1u32)];
                                if !c.check(params, lhs.clone(), rhs) {
                                    break 'outer;
                                }
                            }
                        }
                    }
                }
            }
            Inequality::SpikeBelowRectangle => {
                for d1 in 1..=k_max {
                    for d2 in d1..=k_max {
                        for k in sample_grid(&one, &eta(d1), samples) {
                            let lhs = c.w(d1, &k);
                            // m = N + k − 1 ranges over [k, η(δ2)]
                            for m in sample_grid(&k, &eta(d2), samples) {
                                let n = &m + 1u32 - &k;
                                let rhs = scaled(c.w(d2, &m), &n);
                                let params = vec![("delta1", b(d1)), ("delta2", b(d2)), ("k", k.clone()), ("N", n)];
                                if !c.check(params, lhs.clone(), rhs) {
                                    break 'outer;
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    c.report
}
