//! JSON has no infinity; exponents and speeds that may be infinite go through here.

use serde::de::{self, Deserializer, Visitor};
use serde::Serializer;
use std::fmt;

/// Format a float for text output: `inf`, `-inf`, `nan` or 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x == f64::INFINITY {
        "inf".into()
    } else if x == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{:.16e}", x)
    }
}

pub fn parse_f64(s: &str) -> Option<f64> {
    match s.trim() {
        "inf" | "+inf" | "infinity" => Some(f64::INFINITY),
        "-inf" | "-infinity" => Some(f64::NEG_INFINITY),
        "nan" => Some(f64::NAN),
        t => t.parse().ok(),
    }
}

struct F64Visitor;

impl<'de> Visitor<'de> for F64Visitor {
    type Value = f64;

    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str("a number or one of \"inf\", \"-inf\", \"nan\"")
    }

    fn visit_f64<E: de::Error>(self, v: f64) -> Result<f64, E> {
        Ok(v)
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> Result<f64, E> {
        Ok(v as f64)
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> Result<f64, E> {
        Ok(v as f64)
    }

    fn visit_str<E: de::Error>(self, v: &str) -> Result<f64, E> {
        parse_f64(v).ok_or_else(|| E::custom(format!("bad number `{v}`")))
    }
}

/// `#[serde(with = "maybe_inf")]` for plain `f64`.
pub mod maybe_inf {
    use super::*;

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        if x.is_finite() {
            s.serialize_f64(*x)
        } else {
            s.serialize_str(&fmt_f64(*x))
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        d.deserialize_any(F64Visitor)
    }
}

/// Same for `Option<f64>`.
pub mod maybe_inf_opt {
    use super::*;
    use serde::Deserialize;

    pub fn serialize<S: Serializer>(x: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
        match x {
            Some(v) => super::maybe_inf::serialize(v, s),
            None => s.serialize_none(),
        }
    }

    #[derive(Deserialize)]
    struct Wrap(#[serde(with = "super::maybe_inf")] f64);

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<f64>, D::Error> {
        Ok(Option::<Wrap>::deserialize(d)?.map(|w| w.0))
    }
}

#[cfg(test)]
mod tests {
    use serde::{Deserialize, Serialize};

    #[derive(Serialize, Deserialize, PartialEq, Debug)]
    struct S {
        #[serde(with = "super::maybe_inf")]
        a: f64,
        #[serde(with = "super::maybe_inf_opt", default)]
        b: Option<f64>,
    }

    #[test]
    fn round_trip() {
        for s in [S { a: f64::INFINITY, b: Some(2.5) }, S { a: 1.0, b: None }, S { a: -3.0, b: Some(f64::INFINITY) }] {
            let j = serde_json::to_string(&s).unwrap();
            assert_eq!(serde_json::from_str::<S>(&j).unwrap(), s);
        }
        assert_eq!(serde_json::to_string(&S { a: f64::INFINITY, b: None }).unwrap(), r#"{"a":"inf","b":null}"#);
    }
}
