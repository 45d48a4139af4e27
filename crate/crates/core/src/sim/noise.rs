// SPDX-License-Identifier: Apache-2.0

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kv::KeyValues;

/// Bit-flip gate noise, readout flips and amplitude-damping-like idle decay.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    /// Flip probability per operand of a one-qubit gate.
    pub eps_1q: f64,
    /// Flip probability per operand per CNOT-equivalent of a controlled gate.
    pub eps_2q: f64,
    /// Flip probability per measured qubit.
    pub eps_meas: f64,
    /// Idle 1 -> 0 decay constant, in DAG layers. `inf` disables decay.
    pub t1_layers: f64,
    pub seed: u64,
}

impl Default for NoiseModel {
    fn default() -> Self {
        Self::noiseless(0)
    }
}

impl NoiseModel {
    pub fn new(eps_1q: f64, eps_2q: f64, eps_meas: f64, t1_layers: f64, seed: u64) -> Result<Self> {
        let nm = Self {
            eps_1q,
            eps_2q,
            eps_meas,
            t1_layers,
            seed,
        };
        nm.validate()?;
        Ok(nm)
    }

    pub fn noiseless(seed: u64) -> Self {
        Self {
            eps_1q: 0.0,
            eps_2q: 0.0,
            eps_meas: 0.0,
            t1_layers: f64::INFINITY,
            seed,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        for (name, p) in [
            ("eps_1q", self.eps_1q),
            ("eps_2q", self.eps_2q),
            ("eps_meas", self.eps_meas),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidNoise(format!("{name} = {p} is not a probability")));
            }
        }
        if self.t1_layers.is_nan() || self.t1_layers <= 0.0 {
            return Err(Error::InvalidNoise(format!(
                "t1_layers = {} must be positive",
                self.t1_layers
            )));
        }
        Ok(())
    }

    pub fn is_noiseless(&self) -> bool {
        self.eps_1q == 0.0 && self.eps_2q == 0.0 && self.eps_meas == 0.0 && self.t1_layers.is_infinite()
    }

    /// Probability that an idle qubit holding 1 decays during one layer.
    pub fn idle_decay(&self) -> f64 {
        1.0 - (-1.0 / self.t1_layers).exp()
    }

    /// Parses the `key = value` noise file format. Missing keys default to
    /// zero noise, `t1_layers = inf` and `seed = 0`.
    pub fn from_config(text: &str) -> Result<Self> {
        let kv = KeyValues::parse(text)?;
        kv.check_keys(&["eps_1q", "eps_2q", "eps_meas", "t1_layers", "seed"])?;
        let nm = Self {
            eps_1q: kv.parse_value("eps_1q")?.unwrap_or(0.0),
            eps_2q: kv.parse_value("eps_2q")?.unwrap_or(0.0),
            eps_meas: kv.parse_value("eps_meas")?.unwrap_or(0.0),
            t1_layers: kv.parse_value("t1_layers")?.unwrap_or(f64::INFINITY),
            seed: kv.parse_value("seed")?.unwrap_or(0),
        };
        nm.validate()?;
        Ok(nm)
    }

    pub fn to_config(&self) -> String {
        format!(
            "eps_1q = {}\neps_2q = {}\neps_meas = {}\nt1_layers = {}\nseed = {}\n",
            self.eps_1q, self.eps_2q, self.eps_meas, self.t1_layers, self.seed
        )
    }
}

/// Mixes a base seed with a stream label. SplitMix64 finalizer.
pub fn derive_seed(base: u64, label: u64) -> u64 {
    let mut z = base ^ label.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_round_trip() {
        let nm = NoiseModel::new(0.001, 0.01, 0.02, 300.0, 7).unwrap();
        assert_eq!(NoiseModel::from_config(&nm.to_config()).unwrap(), nm);
        let inf = NoiseModel::from_config("eps_2q = 0.01\nt1_layers = inf\n").unwrap();
        assert!(inf.t1_layers.is_infinite());
        assert_eq!(inf.idle_decay(), 0.0);
    }

    #[test]
    fn rejects_bad_values() {
        assert!(NoiseModel::new(1.5, 0.0, 0.0, 1.0, 0).is_err());
        assert!(NoiseModel::new(0.0, 0.0, 0.0, 0.0, 0).is_err());
        assert!(NoiseModel::from_config("eps_x = 0.1").is_err());
    }

    #[test]
    fn derived_seeds_differ() {
        assert_ne!(derive_seed(1, 0), derive_seed(1, 1));
        assert_ne!(derive_seed(1, 0), derive_seed(2, 0));
    }
}
