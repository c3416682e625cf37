//! Number formatting shared by the JSON, text and CSV outputs.
//!
//! JSON and CSV carry 17 significant digits in scientific notation; text
//! rounds to 4. Non-finite values become `null` in JSON and `n/a` elsewhere.

use serde::{Serialize, Serializer};
use serde_json::value::RawValue;

/// `{:.16e}`, or `None` for NaN and infinities.
pub fn full(v: f64) -> Option<String> {
    v.is_finite().then(|| format!("{v:.16e}"))
}

pub fn full_or_na(v: f64) -> String {
    full(v).unwrap_or_else(|| "n/a".into())
}

/// Three decimals in scientific notation for human-readable output.
pub fn short(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.3e}")
    } else {
        "n/a".into()
    }
}

pub fn short_opt(v: Option<f64>) -> String {
    v.map(short).unwrap_or_else(|| "n/a".into())
}

pub fn ser_f64<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
    match full(*v) {
        Some(text) => RawValue::from_string(text)
            .map_err(serde::ser::Error::custom)?
            .serialize(s),
        None => s.serialize_none(),
    }
}

pub fn ser_opt_f64<S: Serializer>(v: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
    ser_f64(&v.unwrap_or(f64::NAN), s)
}

pub fn ser_vec_f64<S: Serializer>(v: &[f64], s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for x in v {
        seq.serialize_element(&Num(*x))?;
    }
    seq.end()
}

/// A float that serializes with [`ser_f64`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Num(pub f64);

impl Serialize for Num {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        ser_f64(&self.0, s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_significant_digits() {
        assert_eq!(full(0.1).unwrap(), "1.0000000000000001e-1");
        assert_eq!(serde_json::to_string(&Num(2.5)).unwrap(), "2.5000000000000000e0");
        assert_eq!(serde_json::to_string(&Num(f64::NAN)).unwrap(), "null");
        assert_eq!(short(1234.5), "1.234e3");
    }
}
