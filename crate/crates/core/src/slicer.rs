// SPDX-License-Identifier: Apache-2.0

//! Static and dynamic depth-control slicing.
//!
//! A [`SlicePlan`] partitions a circuit's gate list into contiguous blocks.
//! Each block becomes one job: it is measured at its end and its argmax
//! outcome seeds the next block.

use std::fmt;
use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::circuit::{gate_weight, Circuit, GateKind, QubitId};
use crate::error::{Error, Result};
use crate::mct::{ancillas_needed, decompose_mct};
use crate::qasm::{parse_qasm_named, serialize_qasm};
use crate::sim::{estimate_fidelity, NoiseModel};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SliceMode {
    /// The whole circuit as one block.
    Whole,
    /// Fixed weight budget per block.
    Sdc { budget: usize },
    /// Blocks halved until their estimated fidelity meets the threshold.
    Ddc { threshold: f64 },
}

impl fmt::Display for SliceMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SliceMode::Whole => write!(f, "baseline"),
            SliceMode::Sdc { budget } => write!(f, "sdc:{budget}"),
            SliceMode::Ddc { threshold } => write!(f, "ddc:{threshold}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Block {
    pub index: usize,
    /// First gate index in the plan's circuit.
    pub start: usize,
    /// One past the last gate index.
    pub end: usize,
    pub weight: usize,
}

impl Block {
    pub fn range(&self) -> Range<usize> {
        self.start..self.end
    }

    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.start == self.end
    }
}

/// Ordered blocks over a (possibly MCT-expanded) circuit.
///
/// `circuit` is the circuit the blocks index into. It equals the source
/// circuit unless static slicing expanded oversized MCT gates, in which case
/// it is wider by the ancillas the expansion needed; `logical_width` keeps
/// the source width.
#[derive(Debug, Clone, PartialEq)]
pub struct SlicePlan {
    mode: SliceMode,
    circuit: Circuit,
    logical_width: usize,
    blocks: Vec<Block>,
    floor_hit: bool,
    reversed: bool,
}

impl SlicePlan {
    /// One block holding the entire circuit.
    pub fn whole(circuit: &Circuit) -> Result<Self> {
        if circuit.is_empty() {
            return Err(Error::EmptyCircuit);
        }
        Ok(Self {
            mode: SliceMode::Whole,
            logical_width: circuit.width(),
            blocks: vec![Block {
                index: 0,
                start: 0,
                end: circuit.len(),
                weight: circuit.weight(),
            }],
            circuit: circuit.clone(),
            floor_hit: false,
            reversed: false,
        })
    }

    pub(crate) fn from_parts(
        mode: SliceMode,
        circuit: Circuit,
        logical_width: usize,
        blocks: Vec<Block>,
        floor_hit: bool,
        reversed: bool,
    ) -> Self {
        Self {
            mode,
            circuit,
            logical_width,
            blocks,
            floor_hit,
            reversed,
        }
    }

    pub fn mode(&self) -> SliceMode {
        self.mode
    }

    pub fn circuit(&self) -> &Circuit {
        &self.circuit
    }

    pub fn name(&self) -> &str {
        self.circuit.name()
    }

    pub fn width(&self) -> usize {
        self.circuit.width()
    }

    pub fn logical_width(&self) -> usize {
        self.logical_width
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    /// True when dynamic slicing had to emit a single-gate block that still
    /// missed the fidelity threshold.
    pub fn floor_hit(&self) -> bool {
        self.floor_hit
    }

    pub fn is_reversed(&self) -> bool {
        self.reversed
    }

    pub fn block_circuit(&self, index: usize) -> Circuit {
        let mut c = self.circuit.slice(self.blocks[index].range());
        c.set_name(format!("{}#{}", self.circuit.name(), index));
        c
    }

    /// Weight of the sliced circuit, including any MCT expansion.
    pub fn weight(&self) -> usize {
        self.blocks.iter().map(|b| b.weight).sum()
    }

    /// Serializes to the JSON manifest format.
    pub fn to_manifest(&self) -> String {
        let manifest = Manifest {
            source: self.circuit.name().to_string(),
            mode: self.mode,
            reversed: self.reversed,
            logical_width: self.logical_width,
            width: self.circuit.width(),
            floor_hit: self.floor_hit,
            job_count: self.blocks.len(),
            blocks: self.blocks.clone(),
            circuit_qasm: serialize_qasm(&self.circuit),
        };
        serde_json::to_string_pretty(&manifest).expect("manifest serializes") + "\n"
    }

    pub fn from_manifest(text: &str) -> Result<Self> {
        let m: Manifest = serde_json::from_str(text)
            .map_err(|e| Error::Config(format!("bad plan manifest: {e}")))?;
        let circuit = parse_qasm_named(&m.circuit_qasm, &m.source)?;
        if circuit.width() != m.width || m.logical_width > m.width {
            return Err(Error::Config("manifest widths disagree with circuit".into()));
        }
        let mut cursor = 0;
        for (i, b) in m.blocks.iter().enumerate() {
            let weight: usize = circuit.gates()[b.start.min(circuit.len())..b.end.min(circuit.len())]
                .iter()
                .map(gate_weight)
                .sum();
            if b.index != i || b.start != cursor || b.end <= b.start || b.end > circuit.len() || weight != b.weight {
                return Err(Error::Config(format!("manifest block {i} is inconsistent")));
            }
            cursor = b.end;
        }
        if cursor != circuit.len() || m.blocks.is_empty() {
            return Err(Error::Config("manifest blocks do not cover the circuit".into()));
        }
        Ok(Self {
            mode: m.mode,
            circuit,
            logical_width: m.logical_width,
            blocks: m.blocks,
            floor_hit: m.floor_hit,
            reversed: m.reversed,
        })
    }
}

#[derive(Serialize, Deserialize)]
struct Manifest {
    source: String,
    mode: SliceMode,
    reversed: bool,
    logical_width: usize,
    width: usize,
    floor_hit: bool,
    job_count: usize,
    blocks: Vec<Block>,
    circuit_qasm: String,
}

pub fn plan_job_count(plan: &SlicePlan) -> usize {
    plan.blocks.len()
}

/// Replaces every MCT heavier than `budget` by its Toffoli V-chain on
/// ancillas appended after the source register. Lighter MCTs stay whole.
pub fn expand_oversized_mct(circuit: &Circuit, budget: usize) -> Result<Circuit> {
    let oversized = |g: &crate::circuit::Gate| g.kind() == GateKind::Mct && gate_weight(g) > budget;
    let extra = circuit
        .gates()
        .iter()
        .filter(|g| oversized(g))
        .map(|g| ancillas_needed(g.controls().len()))
        .max()
        .unwrap_or(0);
    if extra == 0 {
        return Ok(circuit.clone());
    }
    let width = circuit.width() + extra;
    let mut out = Circuit::new(circuit.name(), width);
    for g in circuit.gates() {
        if oversized(g) {
            for t in decompose_mct(g, QubitId(circuit.width()), width)? {
                out.push(t)?;
            }
        } else {
            out.push(g.clone())?;
        }
    }
    Ok(out)
}

/// Static depth control with weight budget `budget`.
///
/// Gates are walked in order; a block closes when the next weighted gate
/// would push it past the budget. Zero-weight gates join the open block.
/// MCT gates heavier than the budget are first expanded into Toffolis.
pub fn slice_static(circuit: &Circuit, budget: usize) -> Result<SlicePlan> {
    if budget < 1 {
        return Err(Error::InvalidBudget(budget));
    }
    if circuit.is_empty() {
        return Err(Error::EmptyCircuit);
    }
    let expanded = expand_oversized_mct(circuit, budget)?;
    let mut blocks = Vec::new();
    let mut start = 0;
    let mut weight = 0;
    for (i, g) in expanded.gates().iter().enumerate() {
        let w = gate_weight(g);
        if w > 0 && weight > 0 && weight + w > budget {
            blocks.push(Block {
                index: blocks.len(),
                start,
                end: i,
                weight,
            });
            start = i;
            weight = 0;
        }
        weight += w;
    }
    blocks.push(Block {
        index: blocks.len(),
        start,
        end: expanded.len(),
        weight,
    });
    Ok(SlicePlan {
        mode: SliceMode::Sdc { budget },
        logical_width: circuit.width(),
        circuit: expanded,
        blocks,
        floor_hit: false,
        reversed: false,
    })
}

/// End of the longest block starting at `start` whose weight stays within
/// `limit`, always taking at least one weighted gate, and absorbing the
/// zero-weight gates that follow it.
fn prefix_end(circuit: &Circuit, start: usize, limit: usize) -> (usize, usize) {
    let gates = circuit.gates();
    let mut weight = 0;
    let mut end = start;
    while end < gates.len() {
        let w = gate_weight(&gates[end]);
        if w > 0 && weight > 0 && weight + w > limit {
            break;
        }
        weight += w;
        end += 1;
    }
    (end, weight)
}

/// Dynamic depth control.
///
/// For each block the first candidate is the entire remaining circuit. While
/// the candidate's estimated fidelity is below `threshold`, the candidate
/// weight steps down the halving ladder `ceil(W / 2), ceil(W / 4), ..., 1`
/// of the full circuit weight `W`. The first candidate that passes becomes
/// the block. A single weighted gate is emitted even if it fails, and the
/// plan is flagged.
pub fn slice_dynamic(circuit: &Circuit, threshold: f64, nm: &NoiseModel) -> Result<SlicePlan> {
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(Error::InvalidThreshold(threshold));
    }
    if circuit.is_empty() {
        return Err(Error::EmptyCircuit);
    }
    let total = circuit.weight();
    let mut ladder = Vec::new();
    let mut size = total;
    while size > 1 {
        size = size.div_ceil(2);
        ladder.push(size);
    }

    let gates = circuit.gates();
    let suffix_weight: Vec<usize> = {
        let mut acc = vec![0; gates.len() + 1];
        for i in (0..gates.len()).rev() {
            acc[i] = acc[i + 1] + gate_weight(&gates[i]);
        }
        acc
    };

    let mut blocks = Vec::new();
    let mut floor_hit = false;
    let mut start = 0;
    while start < gates.len() {
        let remaining = suffix_weight[start];
        let candidates = std::iter::once(remaining).chain(ladder.iter().copied().filter(|&s| s < remaining));
        let mut chosen = None;
        let mut last_end = None;
        let mut smallest = None;
        for limit in candidates {
            let (end, weight) = prefix_end(circuit, start, limit);
            smallest = Some((end, weight));
            if last_end == Some(end) {
                continue;
            }
            last_end = Some(end);
            if estimate_fidelity(&circuit.slice(start..end), nm) >= threshold {
                chosen = Some((end, weight));
                break;
            }
        }
        let (end, weight) = match chosen {
            Some(c) => c,
            None => {
                floor_hit = true;
                smallest.expect("at least one candidate")
            }
        };
        blocks.push(Block {
            index: blocks.len(),
            start,
            end,
            weight,
        });
        start = end;
    }
    Ok(SlicePlan {
        mode: SliceMode::Ddc { threshold },
        logical_width: circuit.width(),
        circuit: circuit.clone(),
        blocks,
        floor_hit,
        reversed: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::Gate;

    fn weights(plan: &SlicePlan) -> Vec<usize> {
        plan.blocks().iter().map(|b| b.weight).collect()
    }

    fn repeated(width: usize, gate: Gate, n: usize) -> Circuit {
        Circuit::from_gates("r", width, vec![gate; n]).unwrap()
    }

    #[test]
    fn even_division() {
        let plan = slice_static(&repeated(2, Gate::cnot(0, 1), 10), 5).unwrap();
        assert_eq!(weights(&plan), [5, 5]);
        assert_eq!(plan_job_count(&plan), 2);
    }

    #[test]
    fn final_block_may_be_smaller() {
        let plan = slice_static(&repeated(3, Gate::toffoli(0, 1, 2), 7), 5).unwrap();
        assert_eq!(weights(&plan), [5, 2]);
    }

    #[test]
    fn zero_weight_gates_attach_to_open_block() {
        let c = Circuit::from_gates(
            "z",
            2,
            vec![Gate::x(0), Gate::cnot(0, 1), Gate::x(1), Gate::cnot(1, 0), Gate::x(0)],
        )
        .unwrap();
        let plan = slice_static(&c, 1).unwrap();
        let ranges: Vec<_> = plan.blocks().iter().map(Block::range).collect();
        assert_eq!(ranges, [0..3, 3..5]);
    }

    #[test]
    fn rejects_bad_inputs() {
        let c = repeated(2, Gate::cnot(0, 1), 3);
        assert_eq!(slice_static(&c, 0), Err(Error::InvalidBudget(0)));
        assert_eq!(slice_static(&Circuit::new("e", 2), 3), Err(Error::EmptyCircuit));
        let nm = NoiseModel::noiseless(0);
        assert!(matches!(slice_dynamic(&c, 1.0, &nm), Err(Error::InvalidThreshold(_))));
        assert!(matches!(slice_dynamic(&c, 0.0, &nm), Err(Error::InvalidThreshold(_))));
    }

    #[test]
    fn oversized_mct_is_expanded() {
        let c = Circuit::from_gates(
            "m",
            6,
            vec![Gate::cnot(0, 1), Gate::mct(&[0, 1, 2, 3], 4).unwrap(), Gate::cnot(4, 5)],
        )
        .unwrap();
        // weight 5 MCT fits a budget of 5 and moves into its own block.
        let plan = slice_static(&c, 5).unwrap();
        assert_eq!(plan.width(), 6);
        assert_eq!(weights(&plan), [1, 5, 1]);
        // and is expanded under a budget of 2.
        let plan = slice_static(&c, 2).unwrap();
        assert_eq!(plan.width(), 8);
        assert_eq!(plan.logical_width(), 6);
        assert_eq!(plan.weight(), 7);
        assert_eq!(plan_job_count(&plan), 4);
    }

    #[test]
    fn ddc_halves_to_the_worked_example() {
        let nm = NoiseModel::new(0.0, 0.01, 0.0, f64::INFINITY, 0).unwrap();
        let plan = slice_dynamic(&repeated(2, Gate::cnot(0, 1), 16), 0.9, &nm).unwrap();
        assert_eq!(weights(&plan), [4, 4, 4, 4]);
        assert!(!plan.floor_hit());
        assert_eq!(plan_job_count(&plan), 4);
    }

    #[test]
    fn ddc_tiny_threshold_keeps_whole_circuit() {
        let nm = NoiseModel::new(0.0, 0.01, 0.01, 100.0, 0).unwrap();
        let c = repeated(3, Gate::toffoli(0, 1, 2), 40);
        assert_eq!(plan_job_count(&slice_dynamic(&c, 1e-9, &nm).unwrap()), 1);
    }

    #[test]
    fn ddc_strict_threshold_hits_floor() {
        let nm = NoiseModel::new(0.0, 0.05, 0.0, f64::INFINITY, 0).unwrap();
        let c = repeated(2, Gate::cnot(0, 1), 9);
        let plan = slice_dynamic(&c, 0.999, &nm).unwrap();
        assert_eq!(plan_job_count(&plan), 9);
        assert!(plan.floor_hit());
    }

    #[test]
    fn manifest_round_trip_and_validation() {
        let c = Circuit::from_gates("m", 6, vec![Gate::mct(&[0, 1, 2, 3], 4).unwrap(), Gate::x(5)]).unwrap();
        let plan = slice_static(&c, 2).unwrap();
        let text = plan.to_manifest();
        assert_eq!(SlicePlan::from_manifest(&text).unwrap(), plan);
        let broken = text.replace("\"end\": 2", "\"end\": 3");
        assert!(SlicePlan::from_manifest(&broken).is_err());
    }
}
