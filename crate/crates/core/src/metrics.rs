// SPDX-License-Identifier: Apache-2.0

//! Reliability metrics over measured counts, in percent.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sim::{BitString, Counts};

/// Probability of successful trial: share of shots equal to `expected`.
pub fn pst(counts: &Counts, expected: &BitString) -> Result<f64> {
    if counts.is_empty() || counts.total_shots() == 0 {
        return Err(Error::EmptyCounts);
    }
    Ok(100.0 * counts.get(expected) as f64 / counts.total_shots() as f64)
}

/// Shot-weighted mean of per-run PSTs, one `(counts, expected)` pair per sub-run.
pub fn pst_superposed(runs: &[(Counts, BitString)]) -> Result<f64> {
    let total: u64 = runs.iter().map(|(c, _)| c.total_shots()).sum();
    if total == 0 {
        return Err(Error::EmptyCounts);
    }
    let mut acc = 0.0;
    for (counts, expected) in runs {
        acc += pst(counts, expected)? * counts.total_shots() as f64;
    }
    Ok(acc / total as f64)
}

/// P(expected) minus the largest probability of any other outcome.
pub fn e_max_f(counts: &Counts, expected: &BitString) -> Result<f64> {
    let correct = pst(counts, expected)?;
    let false_max = counts
        .iter()
        .filter(|(b, _)| *b != expected)
        .map(|(_, n)| n)
        .max()
        .unwrap_or(0);
    Ok(correct - 100.0 * false_max as f64 / counts.total_shots() as f64)
}

/// Rounds to one decimal place.
pub fn round1(x: f64) -> f64 {
    // `+ 0.0` turns -0.0 into 0.0.
    (x * 10.0).round() / 10.0 + 0.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsRow {
    pub name: String,
    pub mode: String,
    /// `classical`, `ghz` or `init`.
    pub input: String,
    pub pst: f64,
    pub e_max_f: f64,
    pub job_count: usize,
    /// Trivial layout with the basic router on a coupling map.
    #[serde(default)]
    pub worst_case: bool,
}

impl MetricsRow {
    pub fn new(name: &str, mode: &str, input: &str, pst: f64, e_max_f: f64, job_count: usize) -> Self {
        Self {
            name: name.to_string(),
            mode: mode.to_string(),
            input: input.to_string(),
            pst: round1(pst),
            e_max_f: round1(e_max_f),
            job_count,
            worst_case: false,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn counts(pairs: &[(&str, u64)]) -> Counts {
        pairs.iter().map(|(b, n)| (b.parse().unwrap(), *n)).collect()
    }

    #[test]
    fn pst_arithmetic() {
        let c = counts(&[("11", 4000), ("01", 1000)]);
        assert_eq!(pst(&c, &"11".parse().unwrap()).unwrap(), 80.0);
        assert_eq!(pst(&c, &"00".parse().unwrap()).unwrap(), 0.0);
        assert_eq!(pst(&Counts::new(), &"00".parse().unwrap()), Err(Error::EmptyCounts));
    }

    #[test]
    fn e_max_f_sign() {
        let c = counts(&[("11", 4000), ("01", 1000)]);
        assert_eq!(e_max_f(&c, &"11".parse().unwrap()).unwrap(), 60.0);
        let c = counts(&[("10", 500), ("01", 300), ("00", 200)]);
        assert_eq!(e_max_f(&c, &"11".parse().unwrap()).unwrap(), -50.0);
        let c = counts(&[("11", 77)]);
        assert_eq!(e_max_f(&c, &"11".parse().unwrap()).unwrap(), 100.0);
    }

    #[test]
    fn superposed_average() {
        let a = counts(&[("000", 2000), ("001", 500)]);
        let b = counts(&[("111", 2250), ("110", 250)]);
        let p = pst_superposed(&[(a, "000".parse().unwrap()), (b, "111".parse().unwrap())]).unwrap();
        assert!((p - 85.0).abs() < 1e-9);
    }

    #[test]
    fn rounding() {
        assert_eq!(round1(12.345), 12.3);
        assert_eq!(round1(-8.25), -8.3);
    }
}
