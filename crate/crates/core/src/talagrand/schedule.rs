use num_bigint::BigUint;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::{json, Value};

use super::weight::ExactWeight;
use crate::error::{Error, Result};
use crate::rational::{format_rational, parse_rational, Rational};

/// Default number of levels of the Talagrand schedule.
pub const TALAGRAND_K_MAX: usize = 16;

/// One value η(k).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Eta {
    /// 2^e, kept as its exponent.
    Pow2(u64),
    Int(BigUint),
}

impl Eta {
    /// η ≥ m.
    pub fn at_least(&self, m: &BigUint) -> bool {
        match self {
            Eta::Pow2(e) => m.is_zero() || (m - 1u32).bits() <= *e,
            Eta::Int(n) => n >= m,
        }
    }

    pub fn to_biguint(&self) -> BigUint {
        match self {
            Eta::Pow2(e) => BigUint::one() << *e,
            Eta::Int(n) => n.clone(),
        }
    }

    /// η when it fits in a u64.
    pub fn to_u64(&self) -> Option<u64> {
        match self {
            Eta::Pow2(e) => (*e < 64).then(|| 1u64 << e),
            Eta::Int(n) => n.to_u64(),
        }
    }

}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScheduleKind {
    Talagrand,
    Table,
}

/// The pair (η, α) with δ(m) = min{k : η(k) ≥ m} and
/// w(n) = 2^(−δ(n)) · (η(δ(n))/n)^α(δ(n)).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Schedule {
    kind: ScheduleKind,
    eta: Vec<Eta>,
    alpha: Vec<Rational>,
}

impl Schedule {
    /// η(k) = 2^(2500k⁴), α(k) = (k+5)^(−3) for k ≤ 16.
    pub fn talagrand() -> Self {
        Self::talagrand_up_to(TALAGRAND_K_MAX)
    }

    pub fn talagrand_up_to(k_max: usize) -> Self {
        let eta = (1..=k_max as u64).map(|k| Eta::Pow2(2500 * k.pow(4))).collect();
        let alpha = (1..=k_max as i64)
            .map(|k| Rational::new(1.into(), ((k + 5).pow(3)).into()))
            .collect();
        Schedule { kind: ScheduleKind::Talagrand, eta, alpha }
    }

    /// A finite table; η must be positive and strictly increasing, α ∈ (0, 1].
    pub fn table(eta: Vec<BigUint>, alpha: Vec<Rational>) -> Result<Self> {
        if eta.is_empty() || eta.len() != alpha.len() {
            return Err(Error::Format("eta and alpha must be nonempty and of equal length".into()));
        }
        if eta[0].is_zero() || eta.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Range("eta must be positive and strictly increasing".into()));
        }
        if alpha.iter().any(|a| !a.is_positive() || *a > Rational::one()) {
            return Err(Error::Range("alpha values must lie in (0, 1]".into()));
        }
        Ok(Schedule { kind: ScheduleKind::Table, eta: eta.into_iter().map(Eta::Int).collect(), alpha })
    }

    /// Table from small integers and rational strings, for tests and examples.
    pub fn small_table(eta: &[u64], alpha: &[&str]) -> Result<Self> {
        let alpha = alpha.iter().map(|a| parse_rational(a)).collect::<Result<Vec<_>>>()?;
        Self::table(eta.iter().map(|&e| BigUint::from(e)).collect(), alpha)
    }

    pub fn kind(&self) -> ScheduleKind {
        self.kind
    }

    pub fn k_max(&self) -> usize {
        self.eta.len()
    }

    /// η(k), 1-based.
    pub fn eta(&self, k: usize) -> &Eta {
        &self.eta[k - 1]
    }

    /// α(k), 1-based.
    pub fn alpha(&self, k: usize) -> &Rational {
        &self.alpha[k - 1]
    }

    /// The same schedule cut down to its first `k_max` levels.
    pub fn truncated(&self, k_max: usize) -> Result<Schedule> {
        if k_max == 0 || k_max > self.k_max() {
            return Err(Error::Range(format!("k_max must lie in [1, {}]", self.k_max())));
        }
        Ok(Schedule {
            kind: self.kind,
            eta: self.eta[..k_max].to_vec(),
            alpha: self.alpha[..k_max].to_vec(),
        })
    }

    /// δ(m) = least k with η(k) ≥ m.
    pub fn delta(&self, m: &BigUint) -> Result<usize> {
        if m.is_zero() {
            return Err(Error::Range("δ is defined for m ≥ 1".into()));
        }
        self.eta
            .iter()
            .position(|e| e.at_least(m))
            .map(|i| i + 1)
            .ok_or_else(|| Error::Range(format!("m exceeds η({})", self.k_max())))
    }

    pub fn delta_u64(&self, m: u64) -> Result<usize> {
        self.delta(&BigUint::from(m))
    }

    /// 2^(−k) · (η(k)/n)^α(k).
    pub fn level_weight(&self, k: usize, n: &BigUint) -> ExactWeight {
        let alpha = self.alpha(k);
        let neg_k = Rational::from_integer((-(k as i64)).into());
        match self.eta(k) {
            Eta::Pow2(e) => {
                let log2 = neg_k + alpha * Rational::from_integer((*e).into());
                ExactWeight::power_product(&log2, &[(n.clone(), -alpha)])
            }
            Eta::Int(eta) => {
                ExactWeight::power_product(&neg_k, &[(eta.clone(), alpha.clone()), (n.clone(), -alpha)])
            }
        }
    }

    /// w(n) = level_weight(δ(n), n).
    pub fn weight(&self, n: &BigUint) -> Result<ExactWeight> {
        Ok(self.level_weight(self.delta(n)?, n))
    }

    pub fn weight_u64(&self, n: u64) -> Result<ExactWeight> {
        self.weight(&BigUint::from(n))
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let kind = v.get("kind").and_then(Value::as_str).ok_or_else(|| {
            Error::Format("schedule needs a string field \"kind\"".into())
        })?;
        match kind {
            "talagrand" => {
                let k_max = match v.get("kmax") {
                    None => TALAGRAND_K_MAX,
                    Some(k) => k
                        .as_u64()
                        .filter(|&k| (1..=64).contains(&k))
                        .ok_or_else(|| Error::Format("kmax must be an integer in [1, 64]".into()))?
                        as usize,
                };
                Ok(Self::talagrand_up_to(k_max))
            }
            "table" => {
                let list = |name: &str| {
                    v.get(name)
                        .and_then(Value::as_array)
                        .ok_or_else(|| Error::Format(format!("table schedule needs an array \"{name}\"")))
                };
                let eta = list("eta")?
                    .iter()
                    .map(|e| match e {
                        Value::Number(n) => n
                            .as_u64()
                            .map(BigUint::from)
                            .ok_or_else(|| Error::Format(format!("bad eta value {e}"))),
                        Value::String(s) => s.parse().map_err(|_| Error::Format(format!("bad eta value {e}"))),
                        _ => Err(Error::Format(format!("bad eta value {e}"))),
                    })
                    .collect::<Result<Vec<_>>>()?;
                let alpha = list("alpha")?
                    .iter()
                    .map(|a| match a {
                        Value::String(s) => parse_rational(s),
                        Value::Number(n) if n.is_u64() => Ok(Rational::from_integer(n.as_u64().unwrap().into())),
                        _ => Err(Error::Format(format!("bad alpha value {a}"))),
                    })
                    .collect::<Result<Vec<_>>>()?;
                Self::table(eta, alpha)
            }
            other => Err(Error::Format(format!("unknown schedule kind {other:?}"))),
        }
    }

    pub fn to_json(&self) -> Value {
        match self.kind {
            ScheduleKind::Talagrand => json!({"kind": "talagrand", "kmax": self.k_max()}),
            ScheduleKind::Table => json!({
                "kind": "table",
                "eta": self.eta.iter().map(|e| e.to_biguint().to_string()).collect::<Vec<_>>(),
                "alpha": self.alpha.iter().map(format_rational).collect::<Vec<_>>(),
            }),
        }
    }
}
