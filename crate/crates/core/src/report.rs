//! Serialization helpers for stable, sorted JSON artifacts.

use std::fmt::Display;

use serde::{Serialize, Serializer};
use serde_json::{Number, Value};

use crate::scalar::sig12;

/// Serializes a value through its `Display` impl.
pub fn display<T: Display, S: Serializer>(value: &T, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(value)
}

/// Serializes a float rounded to 12 significant digits.
pub fn float12<S: Serializer>(value: &f64, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_f64(sig12(*value))
}

/// Pretty JSON with keys sorted at every level and every float at 12 significant digits.
pub fn to_sorted_json<T: Serialize>(value: &T) -> serde_json::Result<String> {
    let mut v = serde_json::to_value(value)?;
    round_floats(&mut v);
    serde_json::to_string_pretty(&v)
}

fn round_floats(v: &mut Value) {
    match v {
        Value::Number(x) if x.is_f64() => {
            if let Some(r) = x.as_f64().and_then(|f| Number::from_f64(sig12(f))) {
                *x = r;
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_floats),
        Value::Object(map) => map.values_mut().for_each(round_floats),
        _ => {}
    }
}
