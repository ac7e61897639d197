//! Fixed-precision float formatting shared by every export.
//!
//! Floats are written with 17 significant digits in scientific notation, so
//! a value round-trips exactly and repeated runs give byte-identical files.

use serde::{Serialize, Serializer};
use serde_json::value::RawValue;

/// `x` with 17 significant digits; non-finite values become `NaN`/`inf`.
pub fn fmt17(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        format!("{x}")
    }
}

/// Serialize an `f64` as a JSON number with 17 significant digits
/// (`null` when not finite). Only meaningful with `serde_json`.
pub fn f17<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    if !x.is_finite() {
        return s.serialize_none();
    }
    let raw = RawValue::from_string(fmt17(*x)).map_err(serde::ser::Error::custom)?;
    raw.serialize(s)
}

pub fn f17_opt<S: Serializer>(x: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
    match x {
        Some(v) => f17(v, s),
        None => s.serialize_none(),
    }
}

pub fn f17_vec<S: Serializer>(xs: &[f64], s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(xs.len()))?;
    for x in xs {
        seq.serialize_element(&F17(*x))?;
    }
    seq.end()
}

/// Newtype that serializes through [`f17`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct F17(pub f64);

impl Serialize for F17 {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        f17(&self.0, s)
    }
}

/// A record that can be written as one CSV row.
pub trait CsvRow {
    fn header() -> Vec<&'static str>;
    fn fields(&self) -> Vec<String>;
}
