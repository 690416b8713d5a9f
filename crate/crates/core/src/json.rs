//! Serde helpers.

use serde::Serializer;

/// Finite values as numbers, infinities as the strings `"inf"` / `"-inf"`.
pub fn extended_real<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
    if v.is_finite() {
        s.serialize_f64(*v)
    } else if v.is_nan() {
        s.serialize_none()
    } else if *v > 0.0 {
        s.serialize_str("inf")
    } else {
        s.serialize_str("-inf")
    }
}

/// Inverse of [`extended_real`]; `null` reads back as NaN.
pub fn extended_real_de<'de, D: serde::Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
    #[derive(serde::Deserialize)]
    #[serde(untagged)]
    enum Raw {
        Num(f64),
        Text(String),
        Null(()),
    }
    match serde::Deserialize::deserialize(d)? {
        Raw::Num(v) => Ok(v),
        Raw::Null(()) => Ok(f64::NAN),
        Raw::Text(t) => match t.as_str() {
            "inf" => Ok(f64::INFINITY),
            "-inf" => Ok(f64::NEG_INFINITY),
            _ => Err(serde::de::Error::custom(format!("expected a number, \"inf\" or \"-inf\", got {t:?}"))),
        },
    }
}
