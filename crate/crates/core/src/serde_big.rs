//! Serde adapters writing big numbers as decimal strings, so JSON consumers
//! with double-precision numbers never lose digits.

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serializer};

use crate::exact::{format_rat, parse_rat, ExactInt, ExactRat};

fn parse_int<E: serde::de::Error>(s: &str) -> Result<ExactInt, E> {
    s.parse()
        .map_err(|_| E::custom(format!("invalid integer {s:?}")))
}

pub mod int {
    use super::*;

    pub fn serialize<S: Serializer>(v: &ExactInt, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(v)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<ExactInt, D::Error> {
        parse_int(&String::deserialize(d)?)
    }
}

pub mod int_vec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[ExactInt], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(|x| x.to_string()))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<ExactInt>, D::Error> {
        Vec::<String>::deserialize(d)?
            .iter()
            .map(|s| parse_int(s))
            .collect()
    }
}

pub mod rat {
    use super::*;

    pub fn serialize<S: Serializer>(v: &ExactRat, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rat(v))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<ExactRat, D::Error> {
        let s = String::deserialize(d)?;
        parse_rat(&s).map_err(D::Error::custom)
    }
}

pub mod rat_vec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[ExactRat], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(format_rat))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<ExactRat>, D::Error> {
        Vec::<String>::deserialize(d)?
            .iter()
            .map(|s| parse_rat(s).map_err(D::Error::custom))
            .collect()
    }
}
