//! JSON exchange formats.
//!
//! Coordinates are JSON numbers or `"p/q"` strings. Numbers are parsed from
//! their literal text, so `0.1` means exactly 1/10. On output, integers are
//! written as numbers and everything else as `"p/q"`.

use num_traits::ToPrimitive;
use serde::ser::{SerializeSeq, Serializer};
use serde_json::{json, Value};

use crate::error::{ParseError, Result};
use crate::octahedron::{LatticeBasis, TranslateSet};
use crate::polytope::{Polytope3, Vec3};
use crate::scalar::{format_rational, parse_rational, Rational};

pub fn rational_to_json(r: &Rational) -> Value {
    if r.is_integer() {
        if let Some(n) = r.numer().to_i64() {
            return Value::from(n);
        }
    }
    Value::String(format_rational(r))
}

pub fn rational_from_json(v: &Value) -> Result<Rational, ParseError> {
    match v {
        Value::Number(n) => parse_rational(&n.to_string()),
        Value::String(s) => parse_rational(s),
        other => Err(ParseError::Format(format!("expected a number or \"p/q\" string, got {other}"))),
    }
}

pub fn vec3_to_json(p: &Vec3) -> Value {
    Value::Array(p.coords().iter().map(|c| rational_to_json(c)).collect())
}

pub fn vec3_from_json(v: &Value) -> Result<Vec3, ParseError> {
    let arr = v
        .as_array()
        .filter(|a| a.len() == 3)
        .ok_or_else(|| ParseError::Format(format!("expected a coordinate triple, got {v}")))?;
    Ok(Vec3::new(
        rational_from_json(&arr[0])?,
        rational_from_json(&arr[1])?,
        rational_from_json(&arr[2])?,
    ))
}

fn parse_json(text: &str) -> Result<Value, ParseError> {
    serde_json::from_str(text).map_err(|e| ParseError::Json(e.to_string()))
}

fn point_list(doc: &Value, key: &str) -> Result<Vec<Vec3>, ParseError> {
    doc.get(key)
        .and_then(Value::as_array)
        .ok_or_else(|| ParseError::Format(format!("missing array field \"{key}\"")))?
        .iter()
        .map(vec3_from_json)
        .collect()
}

fn to_pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values always serialize");
    s.push('\n');
    s
}

/// `{"vertices": [...]}`; the facet description is always recomputed.
pub fn read_polytope(text: &str) -> Result<Polytope3> {
    let doc = parse_json(text)?;
    Polytope3::from_vertices(&point_list(&doc, "vertices")?)
}

pub fn write_polytope(p: &Polytope3) -> String {
    let vs: Vec<Value> = p.vertices().iter().map(vec3_to_json).collect();
    to_pretty(&json!({ "vertices": vs }))
}

/// `{"translates": [...]}`; duplicates are rejected.
pub fn read_translates(text: &str) -> Result<TranslateSet> {
    let doc = parse_json(text)?;
    TranslateSet::new(point_list(&doc, "translates")?)
}

pub fn write_translates(set: &TranslateSet) -> String {
    let ts: Vec<Value> = set.iter().map(vec3_to_json).collect();
    to_pretty(&json!({ "translates": ts }))
}

/// `{"rows": [b1, b2, b3], "determinant": ...}`. A stated determinant must
/// match the computed one.
pub fn read_lattice(text: &str) -> Result<LatticeBasis> {
    let doc = parse_json(text)?;
    let rows = point_list(&doc, "rows")?;
    let rows: [Vec3; 3] = rows
        .try_into()
        .map_err(|_| ParseError::Format("a lattice basis needs exactly three rows".into()))?;
    let basis = LatticeBasis::new(rows)?;
    if let Some(d) = doc.get("determinant") {
        let stated = rational_from_json(d)?;
        if &stated != basis.determinant() {
            return Err(ParseError::Format(format!(
                "stated determinant {} differs from computed {}",
                format_rational(&stated),
                format_rational(basis.determinant())
            ))
            .into());
        }
    }
    Ok(basis)
}

pub fn write_lattice(b: &LatticeBasis) -> String {
    let rows: Vec<Value> = b.rows().iter().map(vec3_to_json).collect();
    to_pretty(&json!({ "rows": rows, "determinant": rational_to_json(b.determinant()) }))
}

pub(crate) fn ser_rational<S: Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&format_rational(r))
}

pub(crate) fn ser_opt_rational<S: Serializer>(r: &Option<Rational>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match r {
        Some(r) => s.serialize_str(&format_rational(r)),
        None => s.serialize_none(),
    }
}

pub(crate) fn ser_pair<S: Serializer>(p: &(Rational, Rational), s: S) -> std::result::Result<S::Ok, S::Error> {
    let mut seq = s.serialize_seq(Some(2))?;
    seq.serialize_element(&format_rational(&p.0))?;
    seq.serialize_element(&format_rational(&p.1))?;
    seq.end()
}

pub(crate) fn ser_polytope<S: Serializer>(p: &Polytope3, s: S) -> std::result::Result<S::Ok, S::Error> {
    ser_vec3_list(p.vertices(), s)
}

pub(crate) fn ser_vec3_list<S: Serializer>(ps: &[Vec3], s: S) -> std::result::Result<S::Ok, S::Error> {
    let mut seq = s.serialize_seq(Some(ps.len()))?;
    for p in ps {
        let c: Vec<String> = p.coords().iter().map(|c| format_rational(c)).collect();
        seq.serialize_element(&c)?;
    }
    seq.end()
}
