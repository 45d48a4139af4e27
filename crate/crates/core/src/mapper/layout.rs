// SPDX-License-Identifier: Apache-2.0

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::CouplingMap;
use crate::circuit::Circuit;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LayoutPolicy {
    /// Logical qubit `i` on physical qubit `i`.
    Trivial,
    /// Frequently interacting pairs placed next to each other.
    Greedy,
}

impl fmt::Display for LayoutPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LayoutPolicy::Trivial => "trivial",
            LayoutPolicy::Greedy => "greedy",
        })
    }
}

impl FromStr for LayoutPolicy {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "trivial" => Ok(Self::Trivial),
            "greedy" => Ok(Self::Greedy),
            _ => Err(Error::Config(format!("unknown layout policy `{s}`"))),
        }
    }
}

/// Injective logical -> physical assignment covering every logical qubit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Layout {
    logical_to_physical: Vec<usize>,
}

impl Layout {
    pub fn trivial(width: usize) -> Self {
        Self {
            logical_to_physical: (0..width).collect(),
        }
    }

    pub fn from_vec(logical_to_physical: Vec<usize>) -> Result<Self> {
        let mut seen = logical_to_physical.clone();
        seen.sort_unstable();
        if seen.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Config("layout is not injective".into()));
        }
        Ok(Self { logical_to_physical })
    }

    pub fn physical(&self, logical: usize) -> usize {
        self.logical_to_physical[logical]
    }

    pub fn width(&self) -> usize {
        self.logical_to_physical.len()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.logical_to_physical
    }

    pub(crate) fn swap_physical(&mut self, a: usize, b: usize) {
        for p in &mut self.logical_to_physical {
            if *p == a {
                *p = b;
            } else if *p == b {
                *p = a;
            }
        }
    }

    pub fn is_identity(&self) -> bool {
        self.logical_to_physical.iter().enumerate().all(|(i, &p)| i == p)
    }

    /// Computes the initial layout of `circuit` on `cm` under `policy`.
    pub fn build(circuit: &Circuit, cm: &CouplingMap, policy: LayoutPolicy) -> Result<Self> {
        let width = circuit.width();
        if width > cm.physical_qubits() {
            return Err(Error::InsufficientQubits {
                needed: width,
                available: cm.physical_qubits(),
            });
        }
        match policy {
            LayoutPolicy::Trivial => Ok(Self::trivial(width)),
            LayoutPolicy::Greedy => Ok(greedy(circuit, cm)),
        }
    }
}

/// Pairs in descending interaction count; each pair is placed on the free
/// physical qubits nearest to the already placed partner (or to the map's
/// highest-degree qubit when neither is placed). Leftover logical qubits
/// fill the nearest free slots, active ones first.
fn greedy(circuit: &Circuit, cm: &CouplingMap) -> Layout {
    let width = circuit.width();
    let mut interactions: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for g in circuit.gates().iter().filter(|g| g.arity() > 1) {
        let qs: Vec<usize> = g.qubits().map(|q| q.0).collect();
        for i in 0..qs.len() {
            for j in i + 1..qs.len() {
                *interactions.entry((qs[i].min(qs[j]), qs[i].max(qs[j]))).or_insert(0) += 1;
            }
        }
    }
    let mut pairs: Vec<_> = interactions.into_iter().collect();
    pairs.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));

    let n = cm.physical_qubits();
    let center = (0..n)
        .max_by(|&a, &b| cm.neighbors(a).len().cmp(&cm.neighbors(b).len()).then(b.cmp(&a)))
        .unwrap_or(0);
    let mut placed: Vec<Option<usize>> = vec![None; width];
    let mut free = vec![true; n];

    let nearest_free = |free: &[bool], from: usize| -> usize {
        (0..n)
            .filter(|&p| free[p])
            .min_by_key(|&p| (cm.raw_distance(from, p), p))
            .expect("width <= physical qubits")
    };
    let place = |placed: &mut Vec<Option<usize>>, free: &mut Vec<bool>, l: usize, near: usize| {
        let p = nearest_free(free, near);
        free[p] = false;
        placed[l] = Some(p);
    };

    for ((a, b), _) in pairs {
        match (placed[a], placed[b]) {
            (Some(_), Some(_)) => {}
            (Some(pa), None) => place(&mut placed, &mut free, b, pa),
            (None, Some(pb)) => place(&mut placed, &mut free, a, pb),
            (None, None) => {
                place(&mut placed, &mut free, a, center);
                let pa = placed[a].expect("just placed");
                place(&mut placed, &mut free, b, pa);
            }
        }
    }
    let active = circuit.active_qubits();
    let rest = active
        .iter()
        .map(|q| q.0)
        .chain((0..width).filter(|l| !active.iter().any(|q| q.0 == *l)));
    for l in rest.collect::<Vec<_>>() {
        if placed[l].is_none() {
            place(&mut placed, &mut free, l, center);
        }
    }
    Layout {
        logical_to_physical: placed.into_iter().map(|p| p.expect("all placed")).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::Gate;

    #[test]
    fn trivial_is_identity() {
        let c = Circuit::from_gates("c", 3, vec![Gate::cnot(0, 2)]).unwrap();
        let l = Layout::build(&c, &CouplingMap::linear(5), LayoutPolicy::Trivial).unwrap();
        assert!(l.is_identity());
        assert_eq!(l.width(), 3);
    }

    #[test]
    fn greedy_places_hot_pair_adjacent() {
        let mut c = Circuit::new("c", 4);
        c.extend([Gate::cnot(0, 3), Gate::cnot(0, 3), Gate::cnot(3, 0), Gate::cnot(1, 2)]);
        let cm = CouplingMap::linear(4);
        let l = Layout::build(&c, &cm, LayoutPolicy::Greedy).unwrap();
        assert!(cm.is_adjacent(l.physical(0), l.physical(3)));
        assert!(cm.is_adjacent(l.physical(1), l.physical(2)));
        let mut ps = l.as_slice().to_vec();
        ps.sort_unstable();
        assert_eq!(ps, [0, 1, 2, 3]);
    }

    #[test]
    fn too_wide_is_rejected() {
        let c = Circuit::new("c", 6);
        assert_eq!(
            Layout::build(&c, &CouplingMap::linear(5), LayoutPolicy::Greedy),
            Err(Error::InsufficientQubits { needed: 6, available: 5 })
        );
    }
}
