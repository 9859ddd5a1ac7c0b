//! `{"atoms": k, "values": {"1,2": "p/q", ...}}` with 1-based atom lists.

use serde_json::{json, Map, Value};

use super::Functional;
use crate::algebra::{canonical_elements, Element, FiniteAlgebra};
use crate::error::{Error, Result};
use crate::rational::{format_rational, parse_rational, Rational};

/// `"1,3"` for atoms {1, 3}; `"0"` for the zero element.
pub fn element_key(a: Element) -> String {
    if a.is_zero() {
        return "0".into();
    }
    a.atoms().map(|i| (i + 1).to_string()).collect::<Vec<_>>().join(",")
}

/// Inverse of [`element_key`]; `""` also denotes zero.
pub fn parse_element_key(key: &str, algebra: &FiniteAlgebra) -> Result<Element> {
    let key = key.trim();
    if key.is_empty() || key == "0" {
        return Ok(Element::ZERO);
    }
    let mut e = Element::ZERO;
    for part in key.split(',') {
        let i: usize = part
            .trim()
            .parse()
            .map_err(|_| Error::Format(format!("bad atom index {part:?} in key {key:?}")))?;
        if i == 0 || i > algebra.n_atoms() {
            return Err(Error::Format(format!("atom {i} outside [1, {}]", algebra.n_atoms())));
        }
        e = e.join(Element::atom(i - 1));
    }
    Ok(e)
}

pub(crate) fn rational_from_json(v: &Value) -> Result<Rational> {
    match v {
        Value::String(s) => parse_rational(s),
        Value::Number(n) if n.is_i64() => Ok(Rational::from_integer(n.as_i64().unwrap().into())),
        _ => Err(Error::Format(format!("expected a rational string, got {v}"))),
    }
}

/// Parses a value table. Returns the table and whether it carries
/// `"functional": true` (skip submeasure validation).
pub fn functional_from_json(v: &Value) -> Result<(Functional, bool)> {
    let obj = v.as_object().ok_or_else(|| Error::Format("expected a JSON object".into()))?;
    let atoms = obj
        .get("atoms")
        .and_then(Value::as_u64)
        .ok_or_else(|| Error::Format("missing integer field \"atoms\"".into()))?;
    let algebra = FiniteAlgebra::new(atoms as usize).map_err(|e| Error::Format(e.to_string()))?;
    if algebra.n_atoms() > super::MAX_TABLE_ATOMS {
        return Err(Error::SizeCap(format!("{atoms} atoms exceeds the table cap")));
    }
    let values = obj
        .get("values")
        .and_then(Value::as_object)
        .ok_or_else(|| Error::Format("missing object field \"values\"".into()))?;
    let mut table: Vec<Option<Rational>> = vec![None; algebra.size() as usize];
    for (key, val) in values {
        let e = parse_element_key(key, &algebra)?;
        if table[e.index()].replace(rational_from_json(val)?).is_some() {
            return Err(Error::Format(format!("duplicate entry for element {key:?}")));
        }
    }
    if table[0].is_none() {
        table[0] = Some(Rational::default());
    }
    let table = table
        .into_iter()
        .enumerate()
        .map(|(mask, v)| {
            v.ok_or_else(|| {
                Error::Format(format!("missing value for element {}", element_key(Element::from_bits(mask as u64))))
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let functional = obj.get("functional").and_then(Value::as_bool).unwrap_or(false);
    Ok((Functional::new(algebra, table)?, functional))
}

/// Table JSON with nonzero elements in size-then-lexicographic order.
pub fn functional_to_json(f: &Functional) -> Value {
    let mut values = Map::new();
    for a in canonical_elements(f.algebra().n_atoms()) {
        values.insert(element_key(a), Value::String(format_rational(f.value(a))));
    }
    json!({ "atoms": f.algebra().n_atoms(), "values": values })
}
