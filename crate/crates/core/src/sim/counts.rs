// SPDX-License-Identifier: Apache-2.0

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::BitString;
use crate::error::{Error, Result};

/// Measured outcome histogram for one shot batch.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Counts {
    total_shots: u64,
    counts: BTreeMap<BitString, u64>,
}

impl Counts {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_map(counts: BTreeMap<BitString, u64>) -> Self {
        let counts: BTreeMap<_, _> = counts.into_iter().filter(|(_, n)| *n > 0).collect();
        let total_shots = counts.values().sum();
        Self {
            total_shots,
            counts,
        }
    }

    pub fn record(&mut self, outcome: BitString, n: u64) {
        if n == 0 {
            return;
        }
        *self.counts.entry(outcome).or_insert(0) += n;
        self.total_shots += n;
    }

    /// Adds every outcome of `other` into `self`.
    pub fn merge(&mut self, other: &Counts) {
        for (k, &n) in &other.counts {
            self.record(k.clone(), n);
        }
    }

    pub fn total_shots(&self) -> u64 {
        self.total_shots
    }

    pub fn get(&self, outcome: &BitString) -> u64 {
        self.counts.get(outcome).copied().unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&BitString, u64)> {
        self.counts.iter().map(|(k, &n)| (k, n))
    }

    /// Outcomes by descending count, ties by ascending bitstring.
    pub fn ranked(&self) -> Vec<(&BitString, u64)> {
        let mut v: Vec<_> = self.iter().collect();
        v.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
        v
    }

    /// Multiplies every count by `factor`.
    pub fn scaled(&self, factor: u64) -> Self {
        Self::from_map(self.counts.iter().map(|(k, &n)| (k.clone(), n * factor)).collect())
    }

    /// Two-column `bitstring count` text, one outcome per line.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (k, n) in self.iter() {
            let _ = writeln!(out, "{k} {n}");
        }
        out
    }

    /// Parses [`Counts::to_text`] output; `#` starts a comment.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut counts = Counts::new();
        let lines = text.lines().map(|l| l.split('#').next().unwrap_or("").trim());
        for line in lines.filter(|l| !l.is_empty()) {
            let (k, n) = line
                .split_once(char::is_whitespace)
                .ok_or_else(|| Error::Config(format!("bad counts line `{line}`")))?;
            let n: u64 = n
                .trim()
                .parse()
                .map_err(|_| Error::Config(format!("bad count in `{line}`")))?;
            counts.record(k.parse()?, n);
        }
        Ok(counts)
    }
}

impl FromIterator<(BitString, u64)> for Counts {
    fn from_iter<T: IntoIterator<Item = (BitString, u64)>>(iter: T) -> Self {
        let mut c = Counts::new();
        for (k, n) in iter {
            c.record(k, n);
        }
        c
    }
}

/// Most frequent outcome; ties go to the lexicographically smallest bitstring.
pub fn argmax_outcome(counts: &Counts) -> Result<BitString> {
    let mut best: Option<(&BitString, u64)> = None;
    for (k, n) in counts.iter() {
        if best.is_none_or(|(_, m)| n > m) {
            best = Some((k, n));
        }
    }
    best.map(|(k, _)| k.clone()).ok_or(Error::EmptyCounts)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn counts(pairs: &[(&str, u64)]) -> Counts {
        pairs.iter().map(|(k, n)| (k.parse().unwrap(), *n)).collect()
    }

    #[test]
    fn argmax_picks_largest() {
        let c = counts(&[("01", 300), ("11", 200)]);
        assert_eq!(argmax_outcome(&c).unwrap().to_string(), "01");
    }

    #[test]
    fn argmax_tie_is_lexicographic() {
        let c = counts(&[("10", 100), ("00", 100)]);
        assert_eq!(argmax_outcome(&c).unwrap().to_string(), "00");
    }

    #[test]
    fn argmax_of_empty_is_error() {
        assert_eq!(argmax_outcome(&Counts::new()), Err(Error::EmptyCounts));
    }

    #[test]
    fn text_and_json_forms() {
        let c = counts(&[("11", 4000), ("01", 1000)]);
        assert_eq!(c.to_text(), "01 1000\n11 4000\n");
        assert_eq!(Counts::from_text(&c.to_text()).unwrap(), c);
        let json = serde_json::to_string(&c).unwrap();
        assert_eq!(json, r#"{"total_shots":5000,"counts":{"01":1000,"11":4000}}"#);
        assert_eq!(serde_json::from_str::<Counts>(&json).unwrap(), c);
    }
}
