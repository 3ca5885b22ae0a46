use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A fixed-width bit string. The first bit is the most significant one when
/// converted to an index, so index order is lexicographic order.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct BitString(Vec<bool>);

impl BitString {
    pub fn new(bits: Vec<bool>) -> Self {
        BitString(bits)
    }

    pub fn zeros(n: usize) -> Self {
        BitString(vec![false; n])
    }

    pub fn ones(n: usize) -> Self {
        BitString(vec![true; n])
    }

    /// The `width`-bit string whose lexicographic rank is `index`.
    pub fn from_index(index: u64, width: usize) -> Self {
        assert!(width <= 64, "bit string too wide for an index");
        BitString(
            (0..width)
                .map(|k| (index >> (width - 1 - k)) & 1 == 1)
                .collect(),
        )
    }

    pub fn to_index(&self) -> u64 {
        assert!(self.0.len() <= 64, "bit string too wide for an index");
        self.0.iter().fold(0, |acc, &b| (acc << 1) | b as u64)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn is_all_ones(&self) -> bool {
        self.0.iter().all(|&b| b)
    }

    pub fn is_all_zeros(&self) -> bool {
        self.0.iter().all(|&b| !b)
    }

    pub fn concat(&self, other: &BitString) -> BitString {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        BitString(v)
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for BitString {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        s.trim()
            .chars()
            .filter(|c| *c != ',' && !c.is_whitespace())
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(Error::Parse(format!("not a bit: {c:?}"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(BitString)
    }
}

impl Serialize for BitString {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for BitString {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_order_is_lexicographic() {
        let b: BitString = "10".parse().unwrap();
        assert_eq!(b.to_index(), 2);
        assert_eq!(BitString::from_index(1, 2).to_string(), "01");
        for i in 0..16 {
            assert_eq!(BitString::from_index(i, 4).to_index(), i);
        }
    }

    #[test]
    fn parse_rejects_non_bits() {
        assert!("012".parse::<BitString>().is_err());
        assert_eq!("1,0,0".parse::<BitString>().unwrap().to_string(), "100");
    }
}
