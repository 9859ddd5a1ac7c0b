//! Exact sums of terms c · ∏ pᵢ^{eᵢ} with rational c and rational eᵢ.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::{json, Value};

use crate::rational::{format_rational, Rational};

/// Starting precision of interval evaluation, in bits.
pub const START_PRECISION: u64 = 128;
/// Default precision cap, in bits.
pub const DEFAULT_PRECISION_CAP: u64 = 16384;
/// Largest integer size (in bits) the exact cross-exponentiation may build.
const EXACT_BIT_BUDGET: u64 = 1 << 26;
/// Exponent denominator for the rigorous logarithm bounds.
const LOG_DENOMINATOR: u32 = 1024;

/// ∏ base^exponent with bases ≥ 2 and every exponent in (0, 1).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Radical(BTreeMap<BigUint, Rational>);

impl Radical {
    pub fn factors(&self) -> &BTreeMap<BigUint, Rational> {
        &self.0
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// A finite sum Σ cᵣ · r over distinct radicals r with nonzero rational cᵣ.
///
/// Radicals over distinct primes are linearly independent over ℚ, so when
/// every base is prime two weights are equal exactly when their canonical
/// forms coincide.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct ExactWeight {
    terms: BTreeMap<Radical, Rational>,
}

/// Outcome of comparing two weights.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Comparison {
    Less,
    Equal,
    Greater,
    Undecided { bits: u64 },
}

impl Comparison {
    pub fn ordering(self) -> Option<Ordering> {
        match self {
            Comparison::Less => Some(Ordering::Less),
            Comparison::Equal => Some(Ordering::Equal),
            Comparison::Greater => Some(Ordering::Greater),
            Comparison::Undecided { .. } => None,
        }
    }

    fn from_ordering(o: Ordering) -> Self {
        match o {
            Ordering::Less => Comparison::Less,
            Ordering::Equal => Comparison::Equal,
            Ordering::Greater => Comparison::Greater,
        }
    }
}

/// How a comparison was decided.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// Canonical forms were identical, or the difference had a single sign.
    Symbolic,
    /// Single-term operands: integer logarithm bounds or integer cross-exponentiation.
    ExactSingleTerm,
    /// Directed-rounding interval evaluation at the given precision.
    Interval { bits: u64 },
}

fn small_primes() -> &'static [u32] {
    static PRIMES: std::sync::OnceLock<Vec<u32>> = std::sync::OnceLock::new();
    PRIMES.get_or_init(|| {
        let limit = 1000u32;
        let mut sieve = vec![true; limit as usize + 1];
        let mut out = Vec::new();
        for p in 2..=limit {
            if sieve[p as usize] {
                out.push(p);
                let mut q = p * p;
                while q <= limit {
                    sieve[q as usize] = false;
                    q += p;
                }
            }
        }
        out
    })
}

/// Partial factorisation: small prime powers plus one leftover cofactor.
fn factor(n: &BigUint) -> Vec<(BigUint, u64)> {
    let mut out = Vec::new();
    if n.is_zero() || n.is_one() {
        return out;
    }
    let twos = n.trailing_zeros().unwrap_or(0);
    if twos > 0 {
        out.push((BigUint::from(2u32), twos));
    }
    let mut rest = n >> twos;
    let limit = if rest.bits() > 4096 { 100 } else { u32::MAX };
    for &p in &small_primes()[1..] {
        if p > limit || rest.is_one() {
            break;
        }
        if let Some(small) = rest.to_u64() {
            if u64::from(p) * u64::from(p) > small {
                break;
            }
        }
        let pb = BigUint::from(p);
        let mut count = 0;
        loop {
            let (q, r) = rest.div_rem(&pb);
            if !r.is_zero() {
                break;
            }
            rest = q;
            count += 1;
        }
        if count > 0 {
            out.push((pb, count));
        }
    }
    if !rest.is_one() {
        out.push((rest, 1));
    }
    out
}

/// Euclid by remainders: one division when either side is small, where the
/// binary algorithm behind `Integer::gcd` is quadratic in the larger size.
fn gcd_by_division(a: &BigInt, b: &BigInt) -> BigInt {
    let (mut a, mut b) = (a.abs(), b.abs());
    if a < b {
        std::mem::swap(&mut a, &mut b);
    }
    while !b.is_zero() {
        let r = &a % &b;
        a = b;
        b = r;
    }
    a
}

/// n/d in lowest terms with d > 0.
fn reduced(n: BigInt, d: BigInt) -> Rational {
    let g = gcd_by_division(&n, &d);
    let (n, d) = if g.is_one() { (n, d) } else { (n / &g, d / &g) };
    if d.is_negative() {
        Rational::new_raw(-n, -d)
    } else {
        Rational::new_raw(n, d)
    }
}

fn add_coefficients(a: &Rational, b: &Rational) -> Rational {
    if a.denom() == b.denom() {
        return reduced(a.numer() + b.numer(), a.denom().clone());
    }
    reduced(a.numer() * b.denom() + b.numer() * a.denom(), a.denom() * b.denom())
}

fn mul_coefficients(a: &Rational, b: &Rational) -> Rational {
    // cross-cancel first so both gcds involve one small-or-equal operand at worst
    let g1 = gcd_by_division(a.numer(), b.denom());
    let g2 = gcd_by_division(b.numer(), a.denom());
    Rational::new_raw((a.numer() / &g1) * (b.numer() / &g2), (a.denom() / &g2) * (b.denom() / &g1))
}

fn rational_from_biguint(n: BigUint) -> Rational {
    Rational::from_integer(BigInt::from_biguint(Sign::Plus, n))
}

/// base^e for integer e (possibly negative).
fn rational_pow(base: &BigUint, e: &BigInt) -> Rational {
    let mag = e.magnitude().to_u32().expect("integer exponent fits in u32");
    let p = rational_from_biguint(base.pow(mag));
    if e.is_negative() {
        p.recip()
    } else {
        p
    }
}

impl ExactWeight {
    pub fn zero() -> Self {
        ExactWeight::default()
    }

    pub fn from_rational(q: Rational) -> Self {
        let mut terms = BTreeMap::new();
        if !q.is_zero() {
            terms.insert(Radical::default(), q);
        }
        ExactWeight { terms }
    }

    pub fn from_integer(n: u64) -> Self {
        Self::from_rational(Rational::from_integer(n.into()))
    }

    /// 2^r.
    pub fn pow2(r: &Rational) -> Self {
        Self::power_product(r, &[])
    }

    /// 2^log2 · ∏ nᵢ^{eᵢ} for positive integers nᵢ.
    pub fn power_product(log2: &Rational, factors: &[(BigUint, Rational)]) -> Self {
        let mut exps: BTreeMap<BigUint, Rational> = BTreeMap::new();
        if !log2.is_zero() {
            exps.insert(BigUint::from(2u32), log2.clone());
        }
        for (n, e) in factors {
            assert!(!n.is_zero(), "bases must be positive");
            if e.is_zero() {
                continue;
            }
            for (p, k) in factor(n) {
                *exps.entry(p).or_insert_with(Rational::zero) += e * Rational::from_integer(k.into());
            }
        }
        let mut coefficient = Rational::one();
        let mut radical = BTreeMap::new();
        for (p, e) in exps {
            let floor = e.floor();
            let frac = &e - &floor;
            if !floor.is_zero() {
                coefficient = mul_coefficients(&coefficient, &rational_pow(&p, floor.numer()));
            }
            if !frac.is_zero() {
                radical.insert(p, frac);
            }
        }
        let mut terms = BTreeMap::new();
        terms.insert(Radical(radical), coefficient);
        ExactWeight { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Radical, &Rational)> {
        self.terms.iter()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn add(&self, other: &ExactWeight) -> ExactWeight {
        let mut terms = self.terms.clone();
        for (r, c) in &other.terms {
            let entry = terms.entry(r.clone()).or_insert_with(Rational::zero);
            *entry = add_coefficients(entry, c);
            if entry.is_zero() {
                terms.remove(r);
            }
        }
        ExactWeight { terms }
    }

    pub fn neg(&self) -> ExactWeight {
        ExactWeight { terms: self.terms.iter().map(|(r, c)| (r.clone(), -c)).collect() }
    }

    pub fn sub(&self, other: &ExactWeight) -> ExactWeight {
        self.add(&other.neg())
    }

    pub fn scale(&self, k: &Rational) -> ExactWeight {
        if k.is_zero() {
            return ExactWeight::zero();
        }
        ExactWeight { terms: self.terms.iter().map(|(r, c)| (r.clone(), mul_coefficients(c, k))).collect() }
    }

    pub fn scale_int(&self, k: u64) -> ExactWeight {
        self.scale(&Rational::from_integer(k.into()))
    }

    /// The value when it is rational.
    pub fn as_rational(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => {
                let (r, c) = self.terms.iter().next().unwrap();
                r.is_empty().then(|| c.clone())
            }
            _ => None,
        }
    }

    /// r with value 2^r, when the value is a positive power of two.
    pub fn as_pow2(&self) -> Option<Rational> {
        if self.terms.len() != 1 {
            return None;
        }
        let (r, c) = self.terms.iter().next().unwrap();
        let two = BigUint::from(2u32);
        if r.0.keys().any(|p| *p != two) || !c.is_positive() {
            return None;
        }
        let log_part = |x: &BigInt| -> Option<i64> {
            let m = x.magnitude();
            let tz = m.trailing_zeros()?;
            (m >> tz).is_one().then_some(tz as i64)
        };
        let num = log_part(c.numer())?;
        let den = log_part(c.denom())?;
        let frac = r.0.get(&two).cloned().unwrap_or_else(Rational::zero);
        Some(frac + Rational::from_integer((num - den).into()))
    }

    /// Canonical JSON: pow2, rational, or a decimal interval.
    pub fn to_json(&self, precision_cap: u64) -> Value {
        if let Some(r) = self.as_pow2() {
            return json!({"kind": "pow2", "log2": format_rational(&r)});
        }
        if let Some(q) = self.as_rational() {
            return json!({"kind": "rational", "value": format_rational(&q)});
        }
        let bits = START_PRECISION.min(precision_cap.max(64));
        let (lo, hi) = self.bounds(bits);
        json!({
            "kind": "interval",
            "lo": decimal(&lo, 30, false),
            "hi": decimal(&hi, 30, true),
            "bits": bits,
        })
    }

    /// Rigorous rational bounds on the value, each term evaluated at `bits` bits.
    pub fn bounds(&self, bits: u64) -> (Rational, Rational) {
        let mut lo = Rational::zero();
        let mut hi = Rational::zero();
        for (r, c) in &self.terms {
            let (rl, rh) = radical_bounds(r, bits);
            if c.is_negative() {
                lo += c * rh.to_rational();
                hi += c * rl.to_rational();
            } else {
                lo += c * rl.to_rational();
                hi += c * rh.to_rational();
            }
        }
        (lo, hi)
    }

    /// Floating approximation, for heuristics only.
    pub fn approx_f64(&self) -> f64 {
        let mut total = 0.0;
        for (r, c) in &self.terms {
            let mut log = log2_rational_approx(c.abs());
            for (p, e) in &r.0 {
                log += e.to_f64().unwrap_or(0.0) * log2_biguint_approx(p);
            }
            let v = log.exp2();
            total += if c.is_negative() { -v } else { v };
        }
        total
    }
}

fn log2_biguint_approx(n: &BigUint) -> f64 {
    let bits = n.bits();
    if bits <= 1000 {
        return n.to_f64().unwrap().log2();
    }
    let top = (n >> (bits - 64)).to_f64().unwrap();
    top.log2() + (bits - 64) as f64
}

fn log2_rational_approx(q: Rational) -> f64 {
    log2_biguint_approx(q.numer().magnitude()) - log2_biguint_approx(q.denom().magnitude())
}

pub fn compare(a: &ExactWeight, b: &ExactWeight) -> Comparison {
    compare_with_cap(a, b, DEFAULT_PRECISION_CAP).0
}

/// Compares and reports how the answer was obtained.
pub fn compare_with_cap(a: &ExactWeight, b: &ExactWeight, cap: u64) -> (Comparison, Method) {
    if a == b {
        return (Comparison::Equal, Method::Symbolic);
    }
    let diff = a.sub(b);
    if diff.is_zero() {
        return (Comparison::Equal, Method::Symbolic);
    }
    if diff.terms.values().all(|c| c.is_positive()) {
        return (Comparison::Greater, Method::Symbolic);
    }
    if diff.terms.values().all(|c| c.is_negative()) {
        return (Comparison::Less, Method::Symbolic);
    }
    let pos: Vec<_> = diff.terms.iter().filter(|(_, c)| c.is_positive()).collect();
    let neg: Vec<_> = diff.terms.iter().filter(|(_, c)| c.is_negative()).collect();
    if pos.len() == 1 && neg.len() == 1 {
        let (ra, ca) = pos[0];
        let (rb, cb) = neg[0];
        if let Some(ord) = compare_single(ca, ra, &-cb, rb) {
            return (Comparison::from_ordering(ord), Method::ExactSingleTerm);
        }
    }
    let mut bits = START_PRECISION;
    loop {
        let (lo, hi) = diff.bounds(bits);
        if lo.is_positive() {
            return (Comparison::Greater, Method::Interval { bits });
        }
        if hi.is_negative() {
            return (Comparison::Less, Method::Interval { bits });
        }
        if bits >= cap {
            return (Comparison::Undecided { bits }, Method::Interval { bits });
        }
        bits = (bits * 2).min(cap);
    }
}

/// Rigorous bounds [lo, hi] on log₂ n for n ≥ 1.
fn log2_bounds(n: &BigUint) -> (Rational, Rational) {
    let bits = n.bits();
    let tz = n.trailing_zeros().unwrap_or(0);
    if tz + 1 == bits {
        let e = Rational::from_integer((bits - 1).into());
        return (e.clone(), e);
    }
    let shift = bits.saturating_sub(64);
    let top = n >> shift;
    let q = LOG_DENOMINATOR;
    // 2^(L-1) ≤ top^q  ⇒  log₂ top ≥ (L-1)/q
    let lo_bits = top.pow(q).bits();
    let upper = if shift == 0 { top.clone() } else { &top + 1u32 };
    // upper^q < 2^L' ⇒ log₂ n < shift + L'/q
    let hi_bits = upper.pow(q).bits();
    let qd = Rational::from_integer(q.into());
    let s = Rational::from_integer(shift.into());
    let lo = &s + Rational::from_integer((lo_bits - 1).into()) / &qd;
    let hi = &s + Rational::from_integer(hi_bits.into()) / &qd;
    (lo, hi)
}

/// Compares ca·ra with cb·rb for positive coefficients, exactly. `None` when
/// the integers needed exceed the size budget.
fn compare_single(ca: &Rational, ra: &Radical, cb: &Rational, rb: &Radical) -> Option<Ordering> {
    // exponent of every base in a / b
    let mut exps: BTreeMap<&BigUint, Rational> = BTreeMap::new();
    for (p, e) in &ra.0 {
        *exps.entry(p).or_insert_with(Rational::zero) += e;
    }
    for (p, e) in &rb.0 {
        *exps.entry(p).or_insert_with(Rational::zero) -= e;
    }
    exps.retain(|_, e| !e.is_zero());
    // ca / cb = num / den, left unreduced: a gcd of huge coefficients costs more than the comparison
    let num = ca.numer().magnitude() * cb.denom().magnitude();
    let den = cb.numer().magnitude() * ca.denom().magnitude();

    // rigorous logarithm bounds first
    let (nl, nh) = log2_bounds(&num);
    let (dl, dh) = log2_bounds(&den);
    let (mut lo, mut hi) = (nl - dh, nh - dl);
    for (p, e) in &exps {
        let (pl, ph) = log2_bounds(p);
        if e.is_positive() {
            lo += e * pl;
            hi += e * ph;
        } else {
            lo += e * ph;
            hi += e * pl;
        }
    }
    if lo.is_positive() {
        return Some(Ordering::Greater);
    }
    if hi.is_negative() {
        return Some(Ordering::Less);
    }

    // exact: raise both sides to the common denominator D
    let d = exps.values().fold(BigInt::one(), |acc, e| acc.lcm(e.denom()));
    let d = d.to_u64()?;
    let mut cost = d.checked_mul(num.bits().max(den.bits()))?;
    for (p, e) in &exps {
        let k = (e * Rational::from_integer(d.into())).to_integer();
        cost = cost.checked_add(k.magnitude().to_u64()?.checked_mul(p.bits())?)?;
    }
    if cost > EXACT_BIT_BUDGET {
        return None;
    }
    let d32 = u32::try_from(d).ok()?;
    let mut left = num.pow(d32);
    let mut right = den.pow(d32);
    for (p, e) in &exps {
        let k = (e * Rational::from_integer(d.into())).to_integer();
        let k32 = k.magnitude().to_u32()?;
        if k.is_positive() {
            left *= p.pow(k32);
        } else {
            right *= p.pow(k32);
        }
    }
    Some(left.cmp(&right))
}

/// A dyadic rational m · 2^e with m ≥ 0.
#[derive(Debug, Clone)]
struct Dyadic {
    mantissa: BigUint,
    exponent: i64,
}

impl Dyadic {
    fn from_int(n: BigUint) -> Self {
        Dyadic { mantissa: n, exponent: 0 }
    }

    fn to_rational(&self) -> Rational {
        let m = rational_from_biguint(self.mantissa.clone());
        let two = BigUint::from(2u32);
        m * rational_pow(&two, &BigInt::from(self.exponent))
    }

    /// Keeps at most `bits` significant bits, rounding down or up.
    fn round(mut self, bits: u64, up: bool) -> Self {
        let len = self.mantissa.bits();
        if len > bits {
            let drop = len - bits;
            let kept = &self.mantissa >> drop;
            let exact = (&kept << drop) == self.mantissa;
            self.mantissa = if up && !exact { kept + 1u32 } else { kept };
            self.exponent += drop as i64;
        }
        self
    }

    fn mul(&self, other: &Dyadic, bits: u64, up: bool) -> Dyadic {
        Dyadic { mantissa: &self.mantissa * &other.mantissa, exponent: self.exponent + other.exponent }
            .round(bits, up)
    }

    fn pow(&self, mut k: u64, bits: u64, up: bool) -> Dyadic {
        let mut acc = Dyadic::from_int(BigUint::one());
        let mut base = self.clone();
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base, bits, up);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base, bits, up);
            }
        }
        acc
    }

    /// Bound on self^(1/q) with about `bits` fractional-scale bits.
    fn root(&self, q: u64, bits: u64, up: bool) -> Dyadic {
        if q == 1 {
            return self.clone();
        }
        // write self = M · 2^(q·t + r) with 0 ≤ r < q, then scale by 2^(q·bits)
        let t = self.exponent.div_euclid(q as i64);
        let r = self.exponent.rem_euclid(q as i64) as u64;
        let scaled = &self.mantissa << (r + q * bits);
        let q32 = u32::try_from(q).expect("root degree fits in u32");
        let mut root = scaled.nth_root(q32);
        if up && root.pow(q32) != scaled {
            root += 1u32;
        }
        Dyadic { mantissa: root, exponent: t - bits as i64 }
    }
}

/// Bounds on a radical at roughly `bits` bits of relative precision.
fn radical_bounds(r: &Radical, bits: u64) -> (Dyadic, Dyadic) {
    let work = bits + 32;
    let mut lo = Dyadic::from_int(BigUint::one());
    let mut hi = Dyadic::from_int(BigUint::one());
    for (p, e) in &r.0 {
        let s = e.numer().to_u64().expect("radical exponent numerator is small");
        let q = e.denom().to_u64().expect("radical exponent denominator is small");
        let base = Dyadic::from_int(p.clone());
        let (bl, bh) = (base.clone().round(work, false), base.round(work, true));
        let fl = bl.pow(s, work, false).root(q, work, false).round(work, false);
        let fh = bh.pow(s, work, true).root(q, work, true).round(work, true);
        lo = lo.mul(&fl, work, false);
        hi = hi.mul(&fh, work, true);
    }
    (lo, hi)
}

/// Scientific decimal with `digits` significant digits, rounded toward −∞
/// (`up = false`) or +∞ (`up = true`).
pub fn decimal(x: &Rational, digits: u32, up: bool) -> String {
    if x.is_zero() {
        return "0".into();
    }
    if x.is_negative() {
        let body = decimal(&-x, digits, !up);
        return format!("-{body}");
    }
    let ten = BigInt::from(10);
    let pow10 = |k: i64| -> Rational {
        if k >= 0 {
            Rational::from_integer(ten.pow(k as u32))
        } else {
            Rational::from_integer(ten.pow((-k) as u32)).recip()
        }
    };
    let log2 = x.numer().bits() as f64 - x.denom().bits() as f64;
    let mut e = (log2 * std::f64::consts::LOG10_2).floor() as i64;
    while pow10(e) > *x {
        e -= 1;
    }
    while pow10(e + 1) <= *x {
        e += 1;
    }
    let scaled = x * pow10(i64::from(digits) - 1 - e);
    let mut m = if up { scaled.ceil() } else { scaled.floor() }.to_integer();
    if m == ten.pow(digits) {
        m = ten.pow(digits - 1);
        e += 1;
    }
    let s = m.to_string();
    let (head, tail) = s.split_at(1);
    let tail = tail.trim_end_matches('0');
    if tail.is_empty() {
        format!("{head}e{e}")
    } else {
        format!("{head}.{tail}e{e}")
    }
}
