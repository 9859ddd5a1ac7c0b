//! Flag and file parsing shared by the commands.

use std::collections::BTreeMap;
use std::io::Read;

use serde_json::{json, Value};

use submeasures::algebra::{cylinder_from_prefix, CylinderSet, CylinderSpace, FiniteAlgebra, Prefix, Subalgebra};
use submeasures::submeasure::{functional_from_json, parse_element_key, Functional, Submeasure};
use submeasures::talagrand::Schedule;
use submeasures::Error;

use crate::Failure;

fn format_error(detail: impl Into<String>) -> Failure {
    Failure::Lib(Error::Format(detail.into()))
}

/// Reads a JSON document from a path, or from stdin for `-`.
pub fn read_json(path: &str) -> Result<Value, Failure> {
    let text = if path == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(|e| Failure::Io(e.to_string()))?;
        s
    } else {
        std::fs::read_to_string(path).map_err(|e| Failure::Io(format!("{path}: {e}")))?
    };
    serde_json::from_str(&text).map_err(|e| format_error(format!("{path}: {e}")))
}

/// `talagrand`, inline JSON, or a path to a schedule file.
pub fn schedule(arg: &str) -> Result<Schedule, Failure> {
    if arg == "talagrand" {
        return Ok(Schedule::talagrand());
    }
    let v = if arg.trim_start().starts_with('{') {
        serde_json::from_str(arg).map_err(|e| format_error(e.to_string()))?
    } else {
        read_json(arg)?
    };
    Ok(Schedule::from_json(&v)?)
}

/// `1=2,3=1` as a prefix; the empty string is the empty prefix.
pub fn prefix(text: &str) -> Result<Prefix, Failure> {
    let mut map = BTreeMap::new();
    for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (c, v) = part.split_once('=').ok_or_else(|| format_error(format!("expected coordinate=value, got {part:?}")))?;
        let parse = |s: &str| s.trim().parse::<usize>().map_err(|_| format_error(format!("bad number in {part:?}")));
        if map.insert(parse(c)?, parse(v)?).is_some() {
            return Err(format_error(format!("coordinate {c} assigned twice")));
        }
    }
    Ok(Prefix::new(map)?)
}

/// Comma-separated unsigned integers.
pub fn numbers(text: &str) -> Result<Vec<usize>, Failure> {
    text.split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| p.parse().map_err(|_| format_error(format!("bad number {p:?}"))))
        .collect()
}

/// A target set at `depth`: `empty`, `full`, `leaves:i,j,...` or a prefix.
pub fn target(space: &CylinderSpace, depth: usize, text: &str) -> Result<CylinderSet, Failure> {
    let text = text.trim();
    Ok(match text {
        "empty" => space.empty(depth)?,
        "full" => space.full(depth)?,
        _ => match text.strip_prefix("leaves:") {
            Some(list) => space.from_leaves(depth, numbers(list)?)?,
            None => cylinder_from_prefix(space, &prefix(text)?, depth)?,
        },
    })
}

pub fn cylinder_json(set: &CylinderSet) -> Value {
    json!({"depth": set.depth(), "points": set.points().collect::<Vec<_>>()})
}

pub fn functional(v: &Value) -> Result<(Functional, bool), Failure> {
    Ok(functional_from_json(v)?)
}

pub fn submeasure(v: &Value) -> Result<Submeasure, Failure> {
    let (f, _) = functional(v)?;
    Ok(Submeasure::from_functional(f)?)
}

pub fn field<'a>(v: &'a Value, name: &str) -> Result<&'a Value, Failure> {
    v.get(name).ok_or_else(|| format_error(format!("missing field {name:?}")))
}

/// A partition given as a list of element keys of `ambient`.
pub fn partition(ambient: FiniteAlgebra, v: &Value) -> Result<Subalgebra, Failure> {
    let list = v.as_array().ok_or_else(|| format_error("a partition is a list of element keys"))?;
    let blocks = list
        .iter()
        .map(|k| {
            let k = k.as_str().ok_or_else(|| format_error("element keys are strings"))?;
            Ok(parse_element_key(k, &ambient)?)
        })
        .collect::<Result<Vec<_>, Failure>>()?;
    Ok(Subalgebra::new(ambient, blocks)?)
}
