// SPDX-License-Identifier: Apache-2.0

//! Gate and circuit representation for reversible classical logic.
//!
//! Every gate in this IR is a permutation of computational basis states
//! except `H`, which exists only so that superposition-preparation circuits
//! (GHZ and friends) can be expressed. `H` is sampled as a fair coin by the
//! noisy simulator and rejected by everything that needs determinism.

use std::fmt;

use crate::error::{Error, Result};

/// Logical qubit index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct QubitId(pub usize);

impl QubitId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl From<usize> for QubitId {
    fn from(value: usize) -> Self {
        QubitId(value)
    }
}

impl fmt::Display for QubitId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "q[{}]", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GateKind {
    X,
    /// Hadamard on a fresh qubit. Only meaningful in preparation circuits.
    H,
    Cnot,
    Toffoli,
    /// Multi-controlled Toffoli with three or more controls.
    Mct,
    Swap,
    Measure,
}

impl GateKind {
    pub fn name(self) -> &'static str {
        match self {
            GateKind::X => "x",
            GateKind::H => "h",
            GateKind::Cnot => "cx",
            GateKind::Toffoli => "ccx",
            GateKind::Mct => "mcx",
            GateKind::Swap => "swap",
            GateKind::Measure => "measure",
        }
    }
}

/// A single gate.
///
/// For `Swap` the two exchanged qubits are `controls[0]` and `target`.
/// For `Measure` the measured qubit is `target` and `classical_bit` names the
/// destination register slot.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Gate {
    kind: GateKind,
    controls: Vec<QubitId>,
    target: QubitId,
    classical_bit: Option<usize>,
}

impl Gate {
    /// Builds a gate, checking operand arity and distinctness.
    pub fn new(
        kind: GateKind,
        controls: Vec<QubitId>,
        target: QubitId,
        classical_bit: Option<usize>,
    ) -> Result<Self> {
        let arity_ok = match kind {
            GateKind::X | GateKind::H | GateKind::Measure => controls.is_empty(),
            GateKind::Cnot | GateKind::Swap => controls.len() == 1,
            GateKind::Toffoli => controls.len() == 2,
            GateKind::Mct => controls.len() >= 3,
        };
        if !arity_ok {
            return Err(Error::InvalidGate(format!(
                "{} cannot take {} control operand(s)",
                kind.name(),
                controls.len()
            )));
        }
        if classical_bit.is_some() && kind != GateKind::Measure {
            return Err(Error::InvalidGate(format!(
                "{} does not write a classical bit",
                kind.name()
            )));
        }
        let mut seen = controls.clone();
        seen.push(target);
        seen.sort_unstable();
        if seen.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidGate(format!(
                "{} operands must be pairwise distinct",
                kind.name()
            )));
        }
        Ok(Self {
            kind,
            controls,
            target,
            classical_bit,
        })
    }

    pub fn x(target: usize) -> Self {
        Self::new(GateKind::X, vec![], QubitId(target), None).expect("x is always valid")
    }

    pub fn h(target: usize) -> Self {
        Self::new(GateKind::H, vec![], QubitId(target), None).expect("h is always valid")
    }

    /// # Panics
    /// If `control == target`.
    pub fn cnot(control: usize, target: usize) -> Self {
        Self::new(GateKind::Cnot, vec![QubitId(control)], QubitId(target), None)
            .expect("cnot operands must differ")
    }

    /// # Panics
    /// If operands are not pairwise distinct.
    pub fn toffoli(c0: usize, c1: usize, target: usize) -> Self {
        Self::new(
            GateKind::Toffoli,
            vec![QubitId(c0), QubitId(c1)],
            QubitId(target),
            None,
        )
        .expect("toffoli operands must be distinct")
    }

    /// Multi-controlled NOT. Two controls produce a `Toffoli`, one a `Cnot`.
    pub fn mct(controls: &[usize], target: usize) -> Result<Self> {
        let kind = match controls.len() {
            0 => GateKind::X,
            1 => GateKind::Cnot,
            2 => GateKind::Toffoli,
            _ => GateKind::Mct,
        };
        Self::new(
            kind,
            controls.iter().copied().map(QubitId).collect(),
            QubitId(target),
            None,
        )
    }

    /// # Panics
    /// If `a == b`.
    pub fn swap(a: usize, b: usize) -> Self {
        Self::new(GateKind::Swap, vec![QubitId(a)], QubitId(b), None)
            .expect("swap operands must differ")
    }

    pub fn measure(qubit: usize, classical_bit: usize) -> Self {
        Self::new(GateKind::Measure, vec![], QubitId(qubit), Some(classical_bit))
            .expect("measure is always valid")
    }

    pub fn kind(&self) -> GateKind {
        self.kind
    }

    pub fn controls(&self) -> &[QubitId] {
        &self.controls
    }

    pub fn target(&self) -> QubitId {
        self.target
    }

    pub fn classical_bit(&self) -> Option<usize> {
        self.classical_bit
    }

    /// All qubits the gate touches, controls first.
    pub fn qubits(&self) -> impl Iterator<Item = QubitId> + '_ {
        self.controls.iter().copied().chain(std::iter::once(self.target))
    }

    pub fn arity(&self) -> usize {
        self.controls.len() + 1
    }

    /// Returns a copy with every operand relabelled through `map`.
    pub fn remap(&self, map: impl Fn(QubitId) -> QubitId) -> Self {
        Self {
            kind: self.kind,
            controls: self.controls.iter().map(|&q| map(q)).collect(),
            target: map(self.target),
            classical_bit: self.classical_bit,
        }
    }

    /// Every non-H gate in this IR is its own inverse.
    pub fn is_self_inverse(&self) -> bool {
        !matches!(self.kind, GateKind::H | GateKind::Measure)
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            GateKind::Measure => write!(
                f,
                "measure {} -> c[{}]",
                self.target,
                self.classical_bit.unwrap_or(self.target.0)
            ),
            _ => {
                write!(f, "{}", self.kind.name())?;
                if self.kind == GateKind::Mct {
                    write!(f, "({})", self.controls.len())?;
                }
                write!(f, " ")?;
                for c in &self.controls {
                    write!(f, "{c},")?;
                }
                write!(f, "{}", self.target)
            }
        }
    }
}

/// Slicing weight of one gate.
///
/// Single-qubit gates and measurements are free; natively supported
/// controlled gates cost one; a `k`-control MCT costs `1 + 2(k - 2)`, the
/// Toffoli count of its ancilla V-chain; a SWAP costs its three CNOTs.
pub fn gate_weight(gate: &Gate) -> usize {
    match gate.kind {
        GateKind::X | GateKind::H | GateKind::Measure => 0,
        GateKind::Cnot | GateKind::Toffoli => 1,
        GateKind::Swap => 3,
        GateKind::Mct => 1 + 2 * (gate.controls.len() - 2),
    }
}

pub fn circuit_weight(circuit: &Circuit) -> usize {
    circuit.gates.iter().map(gate_weight).sum()
}

/// An ordered gate list over `width` qubits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Circuit {
    name: String,
    width: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(name: impl Into<String>, width: usize) -> Self {
        Self {
            name: name.into(),
            width,
            gates: Vec::new(),
        }
    }

    /// Builds a circuit from gates, checking every operand against `width`.
    pub fn from_gates(name: impl Into<String>, width: usize, gates: Vec<Gate>) -> Result<Self> {
        let mut circuit = Self::new(name, width);
        for gate in gates {
            circuit.push(gate)?;
        }
        Ok(circuit)
    }

    pub fn push(&mut self, gate: Gate) -> Result<()> {
        if let Some(q) = gate.qubits().find(|q| q.0 >= self.width) {
            return Err(Error::QubitOutOfRange {
                index: q.0,
                width: self.width,
            });
        }
        self.gates.push(gate);
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn set_name(&mut self, name: impl Into<String>) {
        self.name = name.into();
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn weight(&self) -> usize {
        circuit_weight(self)
    }

    /// Same gates over a wider register. Narrowing is an error.
    pub fn widened(&self, width: usize) -> Result<Self> {
        if width < self.width {
            return Err(Error::WidthMismatch {
                expected: self.width,
                found: width,
            });
        }
        Ok(Self {
            name: self.name.clone(),
            width,
            gates: self.gates.clone(),
        })
    }

    /// Sub-circuit over the gate range, same width.
    pub fn slice(&self, range: std::ops::Range<usize>) -> Self {
        Self {
            name: self.name.clone(),
            width: self.width,
            gates: self.gates[range].to_vec(),
        }
    }

    /// Gate-wise inverse: gates in reverse order. Fails on gates that are
    /// not self-inverse (H and Measure).
    pub fn inverse(&self) -> Result<Self> {
        if let Some(g) = self.gates.iter().find(|g| !g.is_self_inverse()) {
            return Err(Error::InvalidGate(format!(
                "{} has no self-inverse in this IR",
                g.kind().name()
            )));
        }
        Ok(Self {
            name: self.name.clone(),
            width: self.width,
            gates: self.gates.iter().rev().cloned().collect(),
        })
    }

    /// Qubits touched by at least one gate, ascending.
    pub fn active_qubits(&self) -> Vec<QubitId> {
        let mut used = vec![false; self.width];
        for g in &self.gates {
            for q in g.qubits() {
                used[q.0] = true;
            }
        }
        (0..self.width).filter(|&i| used[i]).map(QubitId).collect()
    }
}

impl Extend<Gate> for Circuit {
    /// # Panics
    /// If a gate references a qubit outside the register.
    fn extend<T: IntoIterator<Item = Gate>>(&mut self, iter: T) {
        for g in iter {
            self.push(g).expect("gate out of range");
        }
    }
}
