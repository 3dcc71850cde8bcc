//! Exact rational numbers used for numeral values and action arithmetic.
//!
//! Integers serialize as JSON integers; anything else as a `"p/q"` string so
//! files never lose precision.

use num_rational::Ratio;
use serde::de::{self, Deserializer, Visitor};
use serde::Serializer;
use std::fmt;

pub type Number = Ratio<i64>;

pub fn format_number(n: &Number) -> String {
    if n.is_integer() {
        n.to_integer().to_string()
    } else {
        format!("{}/{}", n.numer(), n.denom())
    }
}

/// Parses `"12"`, `"-3/4"` or a finite decimal like `"2.5"`.
pub fn parse_number(s: &str) -> Option<Number> {
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p: i64 = p.trim().parse().ok()?;
        let q: i64 = q.trim().parse().ok()?;
        if q == 0 {
            return None;
        }
        return Some(Ratio::new(p, q));
    }
    if let Some((int, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) || frac.len() > 12 {
            return None;
        }
        let negative = int.starts_with('-');
        let whole: i64 = if int.is_empty() || int == "-" { 0 } else { int.parse().ok()? };
        let scale = 10i64.checked_pow(frac.len() as u32)?;
        let frac_val: i64 = frac.parse().ok()?;
        let magnitude = whole.abs().checked_mul(scale)?.checked_add(frac_val)?;
        let numer = if negative { -magnitude } else { magnitude };
        return Some(Ratio::new(numer, scale));
    }
    s.parse::<i64>().ok().map(Ratio::from_integer)
}

pub(crate) fn serialize<S: Serializer>(n: &Number, s: S) -> Result<S::Ok, S::Error> {
    if n.is_integer() {
        s.serialize_i64(n.to_integer())
    } else {
        s.serialize_str(&format_number(n))
    }
}

pub(crate) fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Number, D::Error> {
    struct NumberVisitor;

    impl Visitor<'_> for NumberVisitor {
        type Value = Number;

        fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
            f.write_str("an integer or a \"p/q\" rational string")
        }

        fn visit_i64<E: de::Error>(self, v: i64) -> Result<Number, E> {
            Ok(Ratio::from_integer(v))
        }

        fn visit_u64<E: de::Error>(self, v: u64) -> Result<Number, E> {
            i64::try_from(v)
                .map(Ratio::from_integer)
                .map_err(|_| E::custom("integer out of range"))
        }

        fn visit_f64<E: de::Error>(self, v: f64) -> Result<Number, E> {
            parse_number(&v.to_string()).ok_or_else(|| E::custom("non-representable number"))
        }

        fn visit_str<E: de::Error>(self, v: &str) -> Result<Number, E> {
            parse_number(v).ok_or_else(|| E::custom(format!("invalid rational {v:?}")))
        }
    }

    d.deserialize_any(NumberVisitor)
}

pub(crate) mod opt {
    use super::Number;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(n: &Option<Number>, s: S) -> Result<S::Ok, S::Error> {
        match n {
            Some(n) => super::serialize(n, s),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Number>, D::Error> {
        #[derive(Deserialize)]
        struct Wrapper(#[serde(deserialize_with = "super::deserialize")] Number);
        Ok(Option::<Wrapper>::deserialize(d)?.map(|w| w.0))
    }
}
