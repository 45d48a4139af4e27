// SPDX-License-Identifier: Apache-2.0

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Fixed-width classical register value.
///
/// Text form is little-endian: qubit 0 is the rightmost character. Ordering
/// is the lexicographic order of the text form.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct BitString(Vec<bool>);

impl BitString {
    pub fn zeros(width: usize) -> Self {
        Self(vec![false; width])
    }

    pub fn ones(width: usize) -> Self {
        Self(vec![true; width])
    }

    pub fn from_bits(bits: Vec<bool>) -> Self {
        Self(bits)
    }

    /// Low `width` bits of `value`, bit `i` on qubit `i`.
    pub fn from_u64(value: u64, width: usize) -> Self {
        Self((0..width).map(|i| i < 64 && (value >> i) & 1 == 1).collect())
    }

    pub fn width(&self) -> usize {
        self.0.len()
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn get(&self, qubit: usize) -> bool {
        self.0[qubit]
    }

    pub fn set(&mut self, qubit: usize, value: bool) {
        self.0[qubit] = value;
    }

    pub fn into_bits(self) -> Vec<bool> {
        self.0
    }

    /// Zero-extends to `width`. Narrowing is an error.
    pub fn padded(&self, width: usize) -> Result<Self> {
        if width < self.width() {
            return Err(Error::WidthMismatch {
                expected: width,
                found: self.width(),
            });
        }
        let mut bits = self.0.clone();
        bits.resize(width, false);
        Ok(Self(bits))
    }

    /// First `width` bits.
    pub fn truncated(&self, width: usize) -> Self {
        Self(self.0[..width.min(self.width())].to_vec())
    }

    pub fn count_ones(&self) -> usize {
        self.0.iter().filter(|&&b| b).count()
    }
}

impl Ord for BitString {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.iter().rev().cmp(other.0.iter().rev())
    }
}

impl PartialOrd for BitString {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in self.0.iter().rev() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for BitString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .rev()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(Error::InvalidBitString(s.to_string())),
            })
            .collect::<Result<Vec<_>>>()
            .map(Self)
    }
}

impl Serialize for BitString {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for BitString {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_form_is_little_endian() {
        let b = BitString::from_bits(vec![true, false, false]);
        assert_eq!(b.to_string(), "001");
        assert_eq!("001".parse::<BitString>().unwrap(), b);
        assert_eq!(BitString::from_u64(0b110, 3).to_string(), "110");
        assert!("01x".parse::<BitString>().is_err());
    }

    #[test]
    fn ordering_matches_text() {
        let mut v: Vec<BitString> = ["10", "01", "11", "00"]
            .iter()
            .map(|s| s.parse().unwrap())
            .collect();
        v.sort();
        let text: Vec<String> = v.iter().map(ToString::to_string).collect();
        assert_eq!(text, ["00", "01", "10", "11"]);
    }
}
