// SPDX-License-Identifier: Apache-2.0

//! Experiment configuration: a flat `key = value` file.
//!
//! ```text
//! name = alu-cx
//! circuit = ../corpus/alu-cx.qasm   # relative to the config file
//! input = 10110                     # bitstring | zeros | ghz | init:<path>
//! k = 2                             # expected outcomes for init:<path>
//! mode = sdc:5                      # baseline | sdc:<d> | ddc:<t> | measure:<d>
//! shots = 5000
//! noise = cairo-like.noise
//! coupling_map = heavy-hex-27       # optional: name or file
//! layout = greedy                   # trivial | greedy
//! router = lookahead                # basic | lookahead
//! seed = 7                          # overrides the noise file seed
//! ```
//!
//! The `DC_SEED` environment variable, when set, overrides both seeds.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::kv::KeyValues;
use crate::mapper::{LayoutPolicy, RouterPolicy};
use crate::sim::BitString;

pub const SEED_ENV: &str = "DC_SEED";

#[derive(Debug, Clone, PartialEq)]
pub enum InputSpec {
    Bits(BitString),
    Zeros,
    Ghz,
    Init { path: PathBuf, k: usize },
}

impl InputSpec {
    /// `classical`, `ghz` or `init`.
    pub fn kind(&self) -> &'static str {
        match self {
            InputSpec::Bits(_) | InputSpec::Zeros => "classical",
            InputSpec::Ghz => "ghz",
            InputSpec::Init { .. } => "init",
        }
    }

    pub fn is_superposed(&self) -> bool {
        matches!(self, InputSpec::Ghz | InputSpec::Init { .. })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RunMode {
    Baseline,
    Sdc(usize),
    Ddc(f64),
    /// SDC block boundaries marked by bare measurements in a single job.
    Measure(usize),
}

impl fmt::Display for RunMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunMode::Baseline => write!(f, "baseline"),
            RunMode::Sdc(d) => write!(f, "sdc:{d}"),
            RunMode::Ddc(t) => write!(f, "ddc:{t}"),
            RunMode::Measure(d) => write!(f, "measure:{d}"),
        }
    }
}

impl FromStr for RunMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Config(format!("bad mode `{s}`; expected baseline, sdc:<d>, ddc:<t> or measure:<d>"));
        if s == "baseline" {
            return Ok(RunMode::Baseline);
        }
        let (kind, arg) = s.split_once(':').ok_or_else(bad)?;
        match kind {
            "sdc" => Ok(RunMode::Sdc(arg.parse().map_err(|_| bad())?)),
            "measure" => Ok(RunMode::Measure(arg.parse().map_err(|_| bad())?)),
            "ddc" => Ok(RunMode::Ddc(arg.parse().map_err(|_| bad())?)),
            _ => Err(bad()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub name: String,
    pub circuit: PathBuf,
    pub input: InputSpec,
    pub mode: RunMode,
    pub shots: u64,
    pub noise: Option<PathBuf>,
    pub coupling_map: Option<String>,
    pub layout: LayoutPolicy,
    pub router: RouterPolicy,
    /// Overrides the noise file seed.
    pub seed: Option<u64>,
}

const KEYS: &[&str] = &[
    "name", "circuit", "input", "k", "mode", "shots", "noise", "coupling_map", "layout", "router", "seed",
];

impl ExperimentConfig {
    /// Parses config text; relative paths resolve against `base`.
    pub fn parse(text: &str, base: &Path) -> Result<Self> {
        let kv = KeyValues::parse(text)?;
        kv.check_keys(KEYS)?;
        let circuit = base.join(kv.require("circuit")?);
        let name = match kv.get("name") {
            Some(n) => n.to_string(),
            None => circuit
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "circuit".into()),
        };
        let k: Option<usize> = kv.parse_value("k")?;
        let input = match kv.get("input").unwrap_or("zeros") {
            "zeros" => InputSpec::Zeros,
            "ghz" => InputSpec::Ghz,
            s if s.starts_with("init:") => InputSpec::Init {
                path: base.join(&s["init:".len()..]),
                k: k.ok_or_else(|| Error::Config("`input = init:...` needs `k`".into()))?,
            },
            s => InputSpec::Bits(
                s.parse()
                    .map_err(|_| Error::Config(format!("bad input `{s}`")))?,
            ),
        };
        if k.is_some() && !matches!(input, InputSpec::Init { .. }) {
            return Err(Error::Config("`k` only applies to `input = init:...`".into()));
        }
        let shots = kv.parse_value("shots")?.unwrap_or(5000);
        if shots == 0 {
            return Err(Error::ZeroShots);
        }
        Ok(Self {
            name,
            circuit,
            input,
            mode: kv.get("mode").unwrap_or("baseline").parse()?,
            shots,
            noise: kv.get("noise").map(|p| base.join(p)),
            coupling_map: kv.get("coupling_map").map(|m| {
                if looks_like_named_map(m) {
                    m.to_string()
                } else {
                    base.join(m).to_string_lossy().into_owned()
                }
            }),
            layout: kv.get("layout").unwrap_or("trivial").parse()?,
            router: kv.get("router").unwrap_or("basic").parse()?,
            seed: kv.parse_value("seed")?,
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text, path.parent().unwrap_or(Path::new(".")))
    }
}

pub(crate) fn looks_like_named_map(s: &str) -> bool {
    s == "heavy-hex-27" || s.starts_with("linear-") || s.starts_with("grid-")
}

/// Seed precedence: environment, then config, then noise file.
pub fn resolve_seed(env: Option<&str>, config: Option<u64>, noise: u64) -> Result<u64> {
    match env {
        Some(v) => v
            .trim()
            .parse()
            .map_err(|_| Error::Config(format!("{SEED_ENV} must be an unsigned integer, got `{v}`"))),
        None => Ok(config.unwrap_or(noise)),
    }
}

pub fn env_seed() -> Option<String> {
    std::env::var(SEED_ENV).ok().filter(|v| !v.is_empty())
}
