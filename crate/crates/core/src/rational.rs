//! Exact rationals backed by `num-rational`, with the `"num/den"` text form
//! used in every serialized artifact.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn rat(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn int(value: i64) -> Rational {
    Rational::from_integer(BigInt::from(value))
}

/// Formats as `"num/den"`, or `"num"` when the denominator is one.
pub fn to_text(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses `"num/den"`, `"num"` or `"-num/den"`. The result is always reduced.
pub fn parse(text: &str) -> Result<Rational> {
    let bad = || Error::RationalParse(text.to_string());
    let t = text.trim();
    let (n, d) = match t.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (t, "1"),
    };
    let numer: BigInt = n.parse().map_err(|_| bad())?;
    let denom: BigInt = d.parse().map_err(|_| bad())?;
    if denom.is_zero() {
        return Err(bad());
    }
    Ok(Rational::new(numer, denom))
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // Huge numerators/denominators overflow the primitive conversion.
        let n = r.numer().to_f64().unwrap_or(f64::NAN);
        let d = r.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

/// Decimal rendering to 15 significant digits.
pub fn to_decimal(r: &Rational) -> String {
    let v = to_f64(r);
    if v == 0.0 {
        return "0".to_string();
    }
    format!("{:.14e}", v)
}

/// Serde adapter storing a [`Rational`] as its `"num/den"` string.
pub mod text {
    use serde::{Deserialize, Deserializer, Serializer};

    use super::Rational;

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&super::to_text(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let raw = String::deserialize(d)?;
        super::parse(&raw).map_err(serde::de::Error::custom)
    }
}

/// Serde adapter for `Vec<Rational>` as a list of `"num/den"` strings.
pub mod text_vec {
    use serde::ser::SerializeSeq;
    use serde::{Deserialize, Deserializer, Serializer};

    use super::Rational;

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for r in v {
            seq.serialize_element(&super::to_text(r))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
        let raw = Vec::<String>::deserialize(d)?;
        raw.iter()
            .map(|t| super::parse(t).map_err(serde::de::Error::custom))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_form_is_reduced() {
        assert_eq!(to_text(&rat(2, 8)), "1/4");
        assert_eq!(to_text(&rat(-17, 9516)), "-17/9516");
        assert_eq!(to_text(&int(4)), "4");
        assert_eq!(parse(" 10/3 ").unwrap(), rat(10, 3));
        assert_eq!(parse("-2/-4").unwrap(), rat(1, 2));
        assert_eq!(parse("7").unwrap(), int(7));
    }

    #[test]
    fn rejects_garbage() {
        assert!(parse("1/0").is_err());
        assert!(parse("one").is_err());
        assert!(parse("1/2/3").is_err());
    }

    #[test]
    fn decimal_has_fifteen_significant_digits() {
        assert_eq!(to_decimal(&rat(1, 3)), "3.33333333333333e-1");
        assert_eq!(to_decimal(&int(0)), "0");
    }
}
