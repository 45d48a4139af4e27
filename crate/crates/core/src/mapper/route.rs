// SPDX-License-Identifier: Apache-2.0

use std::collections::VecDeque;
use std::fmt::{self, Write as _};
use std::str::FromStr;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use super::{CouplingMap, Layout, LayoutPolicy};
use crate::circuit::{Circuit, Gate, QubitId};
use crate::error::{Error, Result};
use crate::sim::BitString;
use crate::slicer::SlicePlan;

/// Multi-qubit gates considered ahead of the current one by the lookahead router.
pub const LOOKAHEAD_WINDOW: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RouterPolicy {
    /// Walk the first operand along a shortest path to the second.
    Basic,
    /// Among distance-reducing SWAPs, pick the one that best serves the
    /// next [`LOOKAHEAD_WINDOW`] multi-qubit gates.
    Lookahead,
}

impl fmt::Display for RouterPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RouterPolicy::Basic => "basic",
            RouterPolicy::Lookahead => "lookahead",
        })
    }
}

impl FromStr for RouterPolicy {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "basic" => Ok(Self::Basic),
            "lookahead" => Ok(Self::Lookahead),
            _ => Err(Error::Config(format!("unknown router policy `{s}`"))),
        }
    }
}

/// Coupling map plus policies, as carried through configs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoutingOptions {
    pub coupling_map: CouplingMap,
    pub layout: LayoutPolicy,
    pub router: RouterPolicy,
}

impl RoutingOptions {
    pub fn is_worst_case(&self) -> bool {
        self.layout == LayoutPolicy::Trivial && self.router == RouterPolicy::Basic
    }
}

/// A circuit rewritten onto physical qubits with SWAPs inserted.
#[derive(Debug, Clone)]
pub struct RoutedCircuit {
    /// Operates on `coupling_map.physical_qubits()` qubits.
    pub circuit: Circuit,
    pub swap_count: usize,
    pub layout_initial: Layout,
    pub layout_final: Layout,
    pub route_time: Duration,
}

impl RoutedCircuit {
    /// Loads a logical register into the physical register.
    pub fn physical_input(&self, logical: &BitString) -> BitString {
        let mut bits = vec![false; self.circuit.width()];
        for l in 0..self.layout_initial.width() {
            bits[self.layout_initial.physical(l)] = logical.get(l);
        }
        BitString::from_bits(bits)
    }

    /// Reads the logical register back out of a physical outcome.
    pub fn logical_output(&self, physical: &BitString) -> BitString {
        BitString::from_bits(
            (0..self.layout_final.width())
                .map(|l| physical.get(self.layout_final.physical(l)))
                .collect(),
        )
    }

    /// Structural equality ignoring the wall-clock time.
    pub fn same_routing(&self, other: &RoutedCircuit) -> bool {
        self.circuit == other.circuit
            && self.swap_count == other.swap_count
            && self.layout_initial == other.layout_initial
            && self.layout_final == other.layout_final
    }
}

fn pair_cost(cm: &CouplingMap, layout: &Layout, gate: &Gate) -> u64 {
    let ps: Vec<usize> = gate.qubits().map(|q| layout.physical(q.0)).collect();
    let mut cost = 0u64;
    for i in 0..ps.len() {
        for j in i + 1..ps.len() {
            cost += u64::from(cm.raw_distance(ps[i], ps[j]));
        }
    }
    cost
}

struct Router<'a> {
    cm: &'a CouplingMap,
    policy: RouterPolicy,
    layout: Layout,
    out: Circuit,
    swaps: usize,
}

impl Router<'_> {
    fn swap(&mut self, a: usize, b: usize) {
        debug_assert!(self.cm.is_adjacent(a, b));
        self.out.push(Gate::swap(a, b)).expect("physical index in range");
        self.layout.swap_physical(a, b);
        self.swaps += 1;
    }

    fn route_pair(&mut self, a: usize, b: usize, window: &[&Gate]) -> Result<()> {
        loop {
            let (pa, pb) = (self.layout.physical(a), self.layout.physical(b));
            let d = self.cm.distance(pa, pb).ok_or(Error::Disconnected { from: pa, to: pb })?;
            if d <= 1 {
                return Ok(());
            }
            let (x, y) = match self.policy {
                RouterPolicy::Basic => (pa, self.cm.shortest_path(pa, pb)?[1]),
                RouterPolicy::Lookahead => self.best_lookahead_swap(pa, pb, d, window),
            };
            self.swap(x, y);
        }
    }

    fn best_lookahead_swap(&self, pa: usize, pb: usize, d: u32, window: &[&Gate]) -> (usize, usize) {
        let mut candidates = Vec::new();
        for (from, other) in [(pa, pb), (pb, pa)] {
            for &n in self.cm.neighbors(from) {
                if self.cm.raw_distance(n, other) < d {
                    candidates.push((from.min(n), from.max(n)));
                }
            }
        }
        candidates.sort_unstable();
        candidates.dedup();
        candidates
            .into_iter()
            .min_by_key(|&(x, y)| {
                let mut trial = self.layout.clone();
                trial.swap_physical(x, y);
                let score: u64 = window.iter().map(|g| pair_cost(self.cm, &trial, g)).sum();
                (score, x, y)
            })
            .expect("a distance-reducing neighbour exists on any shortest path")
    }

    /// Grows the connected set of operand positions around the target until
    /// it holds every operand. Each step walks the nearest outside operand
    /// along a path that avoids the set.
    fn route_cluster(&mut self, gate: &Gate) -> Result<()> {
        let operands: Vec<usize> = gate.qubits().map(|q| q.0).collect();
        let target = gate.target().0;
        loop {
            let positions: Vec<usize> = operands.iter().map(|&l| self.layout.physical(l)).collect();
            let cluster = self.cluster(&positions, self.layout.physical(target));
            let outside: Vec<usize> = operands
                .iter()
                .copied()
                .filter(|&l| !cluster.contains(&self.layout.physical(l)))
                .collect();
            if outside.is_empty() {
                return Ok(());
            }
            let dist_to_cluster = |p: usize| cluster.iter().map(|&c| self.cm.raw_distance(p, c)).min().unwrap_or(u32::MAX);
            let mover = *outside
                .iter()
                .min_by_key(|&&l| (dist_to_cluster(self.layout.physical(l)), l))
                .expect("non-empty");
            let start = self.layout.physical(mover);
            if dist_to_cluster(start) == u32::MAX {
                return Err(Error::Disconnected {
                    from: start,
                    to: self.layout.physical(target),
                });
            }
            let path = self.path_to_cluster(start, &cluster)?;
            for w in path.windows(2) {
                self.swap(w[0], w[1]);
            }
        }
    }

    fn cluster(&self, positions: &[usize], root: usize) -> Vec<usize> {
        let mut cluster = vec![root];
        let mut queue = VecDeque::from([root]);
        while let Some(u) = queue.pop_front() {
            for &p in positions {
                if !cluster.contains(&p) && self.cm.is_adjacent(u, p) {
                    cluster.push(p);
                    queue.push_back(p);
                }
            }
        }
        cluster
    }

    fn path_to_cluster(&self, start: usize, cluster: &[usize]) -> Result<Vec<usize>> {
        let n = self.cm.physical_qubits();
        let touches = |p: usize| self.cm.neighbors(p).iter().any(|q| cluster.contains(q));
        let mut parent = vec![usize::MAX; n];
        parent[start] = start;
        let mut queue = VecDeque::from([start]);
        while let Some(u) = queue.pop_front() {
            if touches(u) {
                let mut path = vec![u];
                let mut cur = u;
                while cur != start {
                    cur = parent[cur];
                    path.push(cur);
                }
                path.reverse();
                return Ok(path);
            }
            for &v in self.cm.neighbors(u) {
                if parent[v] == usize::MAX && !cluster.contains(&v) {
                    parent[v] = u;
                    queue.push_back(v);
                }
            }
        }
        Err(Error::Disconnected {
            from: start,
            to: cluster[0],
        })
    }
}

/// Lays out and routes `circuit` on `cm`.
///
/// Two-qubit gates end on a coupling edge. Toffoli and MCT gates end with
/// their operands forming a connected subgraph, which is what their CNOT
/// decomposition needs. The routed circuit works on physical indices.
pub fn route(
    circuit: &Circuit,
    cm: &CouplingMap,
    layout_policy: LayoutPolicy,
    router_policy: RouterPolicy,
) -> Result<RoutedCircuit> {
    let started = Instant::now();
    let layout = Layout::build(circuit, cm, layout_policy)?;
    for g in circuit.gates().iter().filter(|g| g.arity() > 1) {
        let ps: Vec<usize> = g.qubits().map(|q| layout.physical(q.0)).collect();
        if let Some(&p) = ps.iter().find(|&&p| cm.distance(ps[0], p).is_none()) {
            return Err(Error::Disconnected { from: ps[0], to: p });
        }
    }

    let multi: Vec<usize> = circuit
        .gates()
        .iter()
        .enumerate()
        .filter(|(_, g)| g.arity() > 1)
        .map(|(i, _)| i)
        .collect();
    let mut router = Router {
        cm,
        policy: router_policy,
        layout: layout.clone(),
        out: Circuit::new(circuit.name(), cm.physical_qubits()),
        swaps: 0,
    };
    let mut next_multi = 0;
    for (i, gate) in circuit.gates().iter().enumerate() {
        if gate.arity() == 2 {
            while next_multi < multi.len() && multi[next_multi] <= i {
                next_multi += 1;
            }
            let window: Vec<&Gate> = multi[next_multi..]
                .iter()
                .take(LOOKAHEAD_WINDOW)
                .map(|&j| &circuit.gates()[j])
                .collect();
            router.route_pair(gate.controls()[0].0, gate.target().0, &window)?;
        } else if gate.arity() > 2 {
            router.route_cluster(gate)?;
        }
        let mapped = gate.remap(|q| QubitId(router.layout.physical(q.0)));
        router.out.push(mapped)?;
    }
    Ok(RoutedCircuit {
        circuit: router.out,
        swap_count: router.swaps,
        layout_initial: layout,
        layout_final: router.layout,
        route_time: started.elapsed(),
    })
}

/// Per-block routing of a slice plan.
#[derive(Debug, Clone)]
pub struct PlanRouting {
    pub blocks: Vec<RoutedCircuit>,
    pub swap_count: usize,
    pub route_time: Duration,
}

impl PlanRouting {
    pub fn max_block_swaps(&self) -> usize {
        self.blocks.iter().map(|b| b.swap_count).max().unwrap_or(0)
    }
}

/// Routes each block independently, each with a fresh layout.
pub fn route_plan(
    plan: &SlicePlan,
    cm: &CouplingMap,
    layout_policy: LayoutPolicy,
    router_policy: RouterPolicy,
) -> Result<PlanRouting> {
    let blocks = (0..plan.blocks().len())
        .map(|i| route(&plan.block_circuit(i), cm, layout_policy, router_policy))
        .collect::<Result<Vec<_>>>()?;
    Ok(PlanRouting {
        swap_count: blocks.iter().map(|b| b.swap_count).sum(),
        route_time: blocks.iter().map(|b| b.route_time).sum(),
        blocks,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SwapRow {
    pub plan: String,
    pub blocks: usize,
    pub swaps: usize,
    pub max_block_swaps: usize,
    #[serde(skip)]
    pub route_time: Duration,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct SwapTable {
    pub rows: Vec<SwapRow>,
}

impl SwapTable {
    /// CSV-shaped text. Wall-clock times are only emitted when asked for,
    /// so default output is reproducible.
    pub fn to_text(&self, timing: bool) -> String {
        let mut out = String::from("plan,blocks,swaps,max_block_swaps");
        if timing {
            out.push_str(",route_time_us");
        }
        out.push('\n');
        for r in &self.rows {
            let _ = write!(out, "{},{},{},{}", r.plan, r.blocks, r.swaps, r.max_block_swaps);
            if timing {
                let _ = write!(out, ",{}", r.route_time.as_micros());
            }
            out.push('\n');
        }
        out
    }
}

/// Routes every plan and tabulates SWAP overhead.
pub fn swap_overhead_report(
    plans: &[SlicePlan],
    cm: &CouplingMap,
    layout_policy: LayoutPolicy,
    router_policy: RouterPolicy,
) -> Result<SwapTable> {
    let rows = plans
        .iter()
        .map(|p| {
            let routed = route_plan(p, cm, layout_policy, router_policy)?;
            Ok(SwapRow {
                plan: p.mode().to_string(),
                blocks: p.blocks().len(),
                swaps: routed.swap_count,
                max_block_swaps: routed.max_block_swaps(),
                route_time: routed.route_time,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SwapTable { rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::simulate_ideal;
    use crate::slicer::slice_static;

    fn check_adjacency(routed: &RoutedCircuit, cm: &CouplingMap) {
        for g in routed.circuit.gates() {
            let ps: Vec<usize> = g.qubits().map(|q| q.0).collect();
            match ps.len() {
                1 => {}
                2 => assert!(cm.is_adjacent(ps[0], ps[1]), "{g}"),
                _ => {
                    // connected operand set
                    let mut seen = vec![ps[ps.len() - 1]];
                    let mut grew = true;
                    while grew {
                        grew = false;
                        for &p in &ps {
                            if !seen.contains(&p) && seen.iter().any(|&s| cm.is_adjacent(s, p)) {
                                seen.push(p);
                                grew = true;
                            }
                        }
                    }
                    assert_eq!(seen.len(), ps.len(), "{g}");
                }
            }
        }
    }

    fn check_semantics(original: &Circuit, routed: &RoutedCircuit) {
        for x in 0..(1u64 << original.width()) {
            let input = BitString::from_u64(x, original.width());
            let expected = simulate_ideal(original, &input).unwrap();
            let out = simulate_ideal(&routed.circuit, &routed.physical_input(&input)).unwrap();
            assert_eq!(routed.logical_output(&out), expected);
        }
    }

    #[test]
    fn adjacent_cnot_needs_nothing() {
        let c = Circuit::from_gates("c", 2, vec![Gate::cnot(0, 1)]).unwrap();
        let cm = CouplingMap::linear(2);
        let r = route(&c, &cm, LayoutPolicy::Trivial, RouterPolicy::Basic).unwrap();
        assert_eq!(r.swap_count, 0);
        assert_eq!(r.circuit.gates(), c.gates());
        assert!(r.layout_initial.is_identity());
    }

    #[test]
    fn distant_cnot_gets_swaps() {
        let c = Circuit::from_gates("c", 4, vec![Gate::cnot(0, 3), Gate::toffoli(0, 2, 3)]).unwrap();
        let cm = CouplingMap::linear(4);
        for policy in [RouterPolicy::Basic, RouterPolicy::Lookahead] {
            let r = route(&c, &cm, LayoutPolicy::Trivial, policy).unwrap();
            assert!(r.swap_count >= 2);
            check_adjacency(&r, &cm);
            check_semantics(&c, &r);
        }
    }

    #[test]
    fn mct_cluster_on_heavy_hex() {
        let c = Circuit::from_gates(
            "m",
            6,
            vec![Gate::mct(&[0, 2, 4, 5], 1).unwrap(), Gate::cnot(5, 0), Gate::swap(3, 1)],
        )
        .unwrap();
        let cm = CouplingMap::heavy_hex_27();
        for lp in [LayoutPolicy::Trivial, LayoutPolicy::Greedy] {
            for rp in [RouterPolicy::Basic, RouterPolicy::Lookahead] {
                let r = route(&c, &cm, lp, rp).unwrap();
                check_adjacency(&r, &cm);
                check_semantics(&c, &r);
            }
        }
    }

    #[test]
    fn disconnected_operands_fail() {
        let cm = CouplingMap::new(4, [(0, 1), (2, 3)]).unwrap();
        let c = Circuit::from_gates("c", 4, vec![Gate::cnot(0, 3)]).unwrap();
        assert!(matches!(
            route(&c, &cm, LayoutPolicy::Trivial, RouterPolicy::Basic),
            Err(Error::Disconnected { .. })
        ));
        let wide = Circuit::new("w", 5);
        assert!(matches!(
            route(&wide, &cm, LayoutPolicy::Trivial, RouterPolicy::Basic),
            Err(Error::InsufficientQubits { .. })
        ));
    }

    #[test]
    fn single_block_plan_matches_whole_route() {
        let c = Circuit::from_gates("c", 4, vec![Gate::cnot(0, 3), Gate::cnot(1, 3)]).unwrap();
        let cm = CouplingMap::linear(4);
        let plan = SlicePlan::whole(&c).unwrap();
        let whole = route(&c, &cm, LayoutPolicy::Greedy, RouterPolicy::Lookahead).unwrap();
        let planned = route_plan(&plan, &cm, LayoutPolicy::Greedy, RouterPolicy::Lookahead).unwrap();
        assert_eq!(planned.blocks.len(), 1);
        assert_eq!(planned.swap_count, whole.swap_count);
        assert_eq!(planned.blocks[0].circuit.gates(), whole.circuit.gates());
    }

    #[test]
    fn overhead_table() {
        let c = Circuit::from_gates("c", 4, vec![Gate::cnot(0, 1), Gate::cnot(2, 3), Gate::cnot(0, 3)]).unwrap();
        let cm = CouplingMap::linear(4);
        let plans = vec![SlicePlan::whole(&c).unwrap(), slice_static(&c, 1).unwrap()];
        let t = swap_overhead_report(&plans, &cm, LayoutPolicy::Trivial, RouterPolicy::Basic).unwrap();
        assert_eq!(t.rows[0].blocks, 1);
        assert_eq!(t.rows[1].blocks, 3);
        assert!(t.to_text(false).starts_with("plan,blocks,swaps,max_block_swaps\nbaseline,1,"));
        let empty = swap_overhead_report(&[], &cm, LayoutPolicy::Trivial, RouterPolicy::Basic).unwrap();
        assert_eq!(empty.to_text(false), "plan,blocks,swaps,max_block_swaps\n");
    }
}
