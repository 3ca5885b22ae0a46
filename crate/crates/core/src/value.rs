//! Exact rational arithmetic for objective values and lemma bounds.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Unbounded exact rational. Derived bounds may leave `[0, 1]` or go negative.
pub type Rational = BigRational;

/// Builds `num / den` in lowest terms. Panics on a zero denominator.
pub fn ratio(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Rational {
    Rational::new(num.into(), den.into())
}

pub fn rational_to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses `"a/b"`, `"a"`, or a finite decimal like `"0.49"`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    if let Some((n, d)) = s.split_once('/') {
        let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
        let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(Rational::new(n, d));
    }
    if let Some((int, frac)) = s.split_once('.') {
        let neg = int.starts_with('-');
        let digits = format!("{}{}", int.trim_start_matches('-'), frac);
        let n = BigInt::from_str(&digits).map_err(|_| bad())?;
        let d = num_traits::pow(BigInt::from(10), frac.len());
        let r = Rational::new(n, d);
        return Ok(if neg { -r } else { r });
    }
    BigInt::from_str(s).map(Rational::from_integer).map_err(|_| bad())
}

/// An exact fraction in `[0, 1]`: a satisfied-constraint fraction or an
/// acceptance probability.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Value(Rational);

impl Value {
    pub fn new(r: Rational) -> Result<Self> {
        if r.is_negative() || r > Rational::one() {
            return Err(Error::InvalidParameter(format!(
                "value {} outside [0, 1]",
                format_rational(&r)
            )));
        }
        Ok(Value(r))
    }

    /// `num / den`; panics if the fraction leaves `[0, 1]` or `den == 0`.
    pub fn from_counts(num: u128, den: u128) -> Self {
        assert!(den > 0 && num <= den, "fraction {num}/{den} outside [0, 1]");
        Value(ratio(num, den))
    }

    pub fn zero() -> Self {
        Value(Rational::zero())
    }

    pub fn one() -> Self {
        Value(Rational::one())
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn as_rational(&self) -> &Rational {
        &self.0
    }

    pub fn into_rational(self) -> Rational {
        self.0
    }

    /// `1 - self`.
    pub fn complement(&self) -> Value {
        Value(Rational::one() - &self.0)
    }

    pub fn to_f64(&self) -> f64 {
        rational_to_f64(&self.0)
    }

    /// True iff `count / total >= self`, without building a rational.
    pub fn admits(&self, count: u64, total: u64) -> bool {
        BigInt::from(count) * self.0.denom() >= self.0.numer() * BigInt::from(total)
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_rational(&self.0))
    }
}

impl FromStr for Value {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Value::new(parse_rational(s)?)
    }
}

impl Serialize for Value {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Value {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Serde adapter writing a [`Rational`] as `"a/b"`.
pub mod rational_str {
    use super::*;

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(serde::de::Error::custom)
    }
}

/// Like [`rational_str`] for optional values.
pub mod opt_rational_str {
    use super::*;

    pub fn serialize<S: Serializer>(r: &Option<Rational>, s: S) -> std::result::Result<S::Ok, S::Error> {
        match r {
            Some(r) => s.serialize_some(&format_rational(r)),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Option<Rational>, D::Error> {
        Option::<String>::deserialize(d)?
            .map(|s| parse_rational(&s).map_err(serde::de::Error::custom))
            .transpose()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduced_form_is_canonical() {
        assert_eq!(Value::from_counts(4, 6), Value::from_counts(2, 3));
        assert_eq!(Value::from_counts(4, 6).to_string(), "2/3");
        assert_eq!(Value::one().to_string(), "1");
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(Value::new(ratio(3, 2)).is_err());
        assert!(Value::new(ratio(-1, 2)).is_err());
    }

    #[test]
    fn parses_fractions_and_decimals() {
        assert_eq!(parse_rational("49/100").unwrap(), ratio(49, 100));
        assert_eq!(parse_rational("0.49").unwrap(), ratio(49, 100));
        assert_eq!(parse_rational("-0.5").unwrap(), ratio(-1, 2));
        assert_eq!(parse_rational("3").unwrap(), ratio(3, 1));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn admits_matches_rational_comparison() {
        let v = Value::from_counts(2, 3);
        assert!(v.admits(2, 3));
        assert!(v.admits(3, 4));
        assert!(!v.admits(1, 2));
    }
}
