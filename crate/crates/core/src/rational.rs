//! `"num/den"` string forms for exact rationals.

use std::collections::BTreeMap;

use serde::{Deserialize, Deserializer, Serializer};

use crate::error::{Error, Result};
use crate::Rational;

pub fn to_string(q: &Rational) -> String {
    q.to_string()
}

pub fn parse(s: &str) -> Result<Rational> {
    s.trim().parse::<Rational>().map_err(|e| Error::Parse {
        what: "rational",
        detail: format!("{s:?}: {e}"),
    })
}

pub fn serialize<S: Serializer>(q: &Rational, serializer: S) -> std::result::Result<S::Ok, S::Error> {
    serializer.serialize_str(&q.to_string())
}

pub fn deserialize<'de, D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Rational, D::Error> {
    let s = String::deserialize(deserializer)?;
    parse(&s).map_err(serde::de::Error::custom)
}

/// Serde adapter for exponent-to-coefficient maps with string keys and values.
pub mod coefficient_map {
    use super::*;
    use serde::ser::SerializeMap;

    pub fn serialize<S: Serializer>(
        map: &BTreeMap<u32, Rational>,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        let mut m = serializer.serialize_map(Some(map.len()))?;
        for (k, v) in map {
            m.serialize_entry(&k.to_string(), &v.to_string())?;
        }
        m.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<BTreeMap<u32, Rational>, D::Error> {
        let raw = BTreeMap::<String, String>::deserialize(deserializer)?;
        raw.into_iter()
            .map(|(k, v)| {
                let k = k.parse::<u32>().map_err(serde::de::Error::custom)?;
                let v = parse(&v).map_err(serde::de::Error::custom)?;
                Ok((k, v))
            })
            .collect()
    }
}
