//! JSON documents for systems and sets.
//!
//! ```text
//! {"type":"permutation","weights":["1/5",...],"map":[1,2,3,4,0]}
//! {"type":"iet","lengths":["2/3","1/3"],"permutation":[1,0]}
//! {"points":[0,2]}
//! {"intervals":[["0","1/5"]]}
//! ```
//!
//! Every rational is a string. Errors name the offending field.

use serde::Serialize;
use serde_json::{Map, Value};
use thiserror::Error;

use crate::dynamics::{System, Transformation};
use crate::error::Error;
use crate::iet::{Iet, IntervalSet};
use crate::measure::{FiniteMeasureSpace, PointSet};
use crate::rational::Rational;

#[derive(Debug, Error)]
pub enum CodecError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{field}: {message}")]
    Field { field: String, message: String },
    #[error("unknown system type {0:?}")]
    UnknownType(String),
    #[error("{field}: {source}")]
    Invalid {
        field: &'static str,
        #[source]
        source: Error,
    },
}

fn field_error(field: impl Into<String>, message: impl Into<String>) -> CodecError {
    CodecError::Field {
        field: field.into(),
        message: message.into(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SystemDoc {
    Permutation(System),
    Iet(Iet),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SetDoc {
    Points(Vec<usize>),
    Intervals(IntervalSet),
}

fn object(value: &Value) -> Result<&Map<String, Value>, CodecError> {
    value
        .as_object()
        .ok_or_else(|| field_error("document", "expected a JSON object"))
}

fn array<'a>(doc: &'a Map<String, Value>, field: &str) -> Result<&'a Vec<Value>, CodecError> {
    match doc.get(field) {
        Some(Value::Array(items)) => Ok(items),
        Some(_) => Err(field_error(field, "expected an array")),
        None => Err(field_error(field, "missing field")),
    }
}

fn rational(value: &Value, field: &str) -> Result<Rational, CodecError> {
    let text = value
        .as_str()
        .ok_or_else(|| field_error(field, "expected a rational string such as \"1/2\""))?;
    text.parse()
        .map_err(|e: crate::rational::ParseRationalError| field_error(field, e.to_string()))
}

fn rationals(doc: &Map<String, Value>, field: &str) -> Result<Vec<Rational>, CodecError> {
    array(doc, field)?
        .iter()
        .enumerate()
        .map(|(i, v)| rational(v, &format!("{field}[{i}]")))
        .collect()
}

fn indices(doc: &Map<String, Value>, field: &str) -> Result<Vec<usize>, CodecError> {
    array(doc, field)?
        .iter()
        .enumerate()
        .map(|(i, v)| {
            v.as_u64()
                .and_then(|n| usize::try_from(n).ok())
                .ok_or_else(|| {
                    field_error(format!("{field}[{i}]"), "expected a nonnegative integer")
                })
        })
        .collect()
}

/// Parses and validates a system document, dispatching on `"type"`.
pub fn parse_system(text: &str) -> Result<SystemDoc, CodecError> {
    let value: Value = serde_json::from_str(text)?;
    let doc = object(&value)?;
    let kind = match doc.get("type") {
        Some(Value::String(kind)) => kind.as_str(),
        Some(_) => return Err(field_error("type", "expected a string")),
        None => return Err(field_error("type", "missing field")),
    };
    match kind {
        "permutation" => {
            let weights = rationals(doc, "weights")?;
            let map = indices(doc, "map")?;
            let space = FiniteMeasureSpace::new(weights).map_err(|source| CodecError::Invalid {
                field: "weights",
                source,
            })?;
            let map = Transformation::new(&space, map).map_err(|source| CodecError::Invalid {
                field: "map",
                source,
            })?;
            Ok(SystemDoc::Permutation(System { space, map }))
        }
        "iet" => {
            let lengths = rationals(doc, "lengths")?;
            let permutation = indices(doc, "permutation")?;
            let field = if lengths.iter().any(|l| !l.is_positive()) || lengths.is_empty() {
                "lengths"
            } else {
                "permutation"
            };
            Iet::new(lengths, permutation)
                .map(SystemDoc::Iet)
                .map_err(|source| CodecError::Invalid { field, source })
        }
        other => Err(CodecError::UnknownType(other.to_owned())),
    }
}

/// Parses `{"points":[...]}` or `{"intervals":[["a","b"],...]}`.
pub fn parse_set(text: &str) -> Result<SetDoc, CodecError> {
    let value: Value = serde_json::from_str(text)?;
    let doc = object(&value)?;
    match (doc.contains_key("points"), doc.contains_key("intervals")) {
        (true, false) => Ok(SetDoc::Points(indices(doc, "points")?)),
        (false, true) => {
            let intervals = array(doc, "intervals")?
                .iter()
                .enumerate()
                .map(|(i, pair)| match pair.as_array().map(Vec::as_slice) {
                    Some([a, b]) => Ok((
                        rational(a, &format!("intervals[{i}][0]"))?,
                        rational(b, &format!("intervals[{i}][1]"))?,
                    )),
                    _ => Err(field_error(
                        format!("intervals[{i}]"),
                        "expected a pair [start, end]",
                    )),
                })
                .collect::<Result<Vec<_>, _>>()?;
            IntervalSet::new(intervals)
                .map(SetDoc::Intervals)
                .map_err(|source| CodecError::Invalid {
                    field: "intervals",
                    source,
                })
        }
        _ => Err(field_error(
            "set",
            "expected exactly one of \"points\" or \"intervals\"",
        )),
    }
}

#[derive(Serialize)]
struct PermutationDoc<'a> {
    #[serde(rename = "type")]
    kind: &'static str,
    weights: &'a [Rational],
    map: &'a [usize],
}

#[derive(Serialize)]
struct IetDoc<'a> {
    #[serde(rename = "type")]
    kind: &'static str,
    lengths: &'a [Rational],
    permutation: &'a [usize],
}

pub fn system_json(system: &System) -> String {
    serde_json::to_string(&PermutationDoc {
        kind: "permutation",
        weights: system.space.weights(),
        map: system.map.forward(),
    })
    .expect("system documents serialize")
}

pub fn iet_json(iet: &Iet) -> String {
    serde_json::to_string(&IetDoc {
        kind: "iet",
        lengths: iet.lengths(),
        permutation: iet.permutation(),
    })
    .expect("exchange documents serialize")
}

/// `[["a","b"],...]`.
pub fn intervals_value(set: &IntervalSet) -> Value {
    Value::Array(
        set.intervals()
            .iter()
            .map(|(a, b)| Value::Array(vec![a.to_string().into(), b.to_string().into()]))
            .collect(),
    )
}

pub fn points_value(set: &PointSet) -> Value {
    Value::Array(set.iter().map(|i| Value::from(i as u64)).collect())
}
