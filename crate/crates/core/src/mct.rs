// SPDX-License-Identifier: Apache-2.0

//! Toffoli V-chain expansion of multi-controlled Toffoli gates.

use crate::circuit::{Gate, GateKind, QubitId};
use crate::error::{Error, Result};

/// Number of clean ancillas the V-chain needs for a `k`-control gate.
pub fn ancillas_needed(controls: usize) -> usize {
    controls.saturating_sub(2)
}

/// Expands a `k`-control MCT into `2(k - 2) + 1` Toffolis.
///
/// Ancillas `ancilla_base .. ancilla_base + k - 2` must start at zero and
/// lie inside a register of `width` qubits; they are returned to zero.
/// The chain computes the running conjunction of the controls into the
/// ancillas, writes the target from the last ancilla and the last control,
/// then uncomputes the ancillas in reverse.
pub fn decompose_mct(gate: &Gate, ancilla_base: QubitId, width: usize) -> Result<Vec<Gate>> {
    if gate.kind() != GateKind::Mct {
        return Err(Error::InvalidGate(format!(
            "expected an mcx gate, got {}",
            gate.kind().name()
        )));
    }
    let controls = gate.controls();
    let k = controls.len();
    let needed = ancillas_needed(k);
    let available = width.saturating_sub(ancilla_base.0);
    if available < needed {
        return Err(Error::InsufficientAncillas { needed, available });
    }
    let ancillas: Vec<usize> = (ancilla_base.0..ancilla_base.0 + needed).collect();
    if let Some(q) = gate.qubits().find(|q| ancillas.contains(&q.0)) {
        return Err(Error::InvalidGate(format!(
            "ancilla {q} overlaps an operand of the gate"
        )));
    }

    let c = |i: usize| controls[i].0;
    let mut compute = Vec::with_capacity(needed);
    compute.push(Gate::toffoli(c(0), c(1), ancillas[0]));
    for i in 1..needed {
        compute.push(Gate::toffoli(ancillas[i - 1], c(i + 1), ancillas[i]));
    }

    let mut out = compute.clone();
    out.push(Gate::toffoli(ancillas[needed - 1], c(k - 1), gate.target().0));
    out.extend(compute.into_iter().rev());
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::gate_weight;

    #[test]
    fn three_controls_match_reference_structure() {
        let g = Gate::mct(&[0, 1, 2], 3).unwrap();
        let out = decompose_mct(&g, QubitId(4), 5).unwrap();
        assert_eq!(
            out,
            vec![
                Gate::toffoli(0, 1, 4),
                Gate::toffoli(4, 2, 3),
                Gate::toffoli(0, 1, 4)
            ]
        );
        assert_eq!(out.len(), gate_weight(&g));
    }

    #[test]
    fn length_matches_weight() {
        for k in 3..=10 {
            let controls: Vec<usize> = (0..k).collect();
            let g = Gate::mct(&controls, k).unwrap();
            let out = decompose_mct(&g, QubitId(k + 1), 2 * k).unwrap();
            assert_eq!(out.len(), gate_weight(&g));
            assert!(out.iter().all(|g| g.kind() == GateKind::Toffoli));
        }
    }

    #[test]
    fn rejects_short_ancilla_run() {
        let g = Gate::mct(&[0, 1, 2, 3], 4).unwrap();
        assert_eq!(
            decompose_mct(&g, QubitId(5), 6),
            Err(Error::InsufficientAncillas {
                needed: 2,
                available: 1
            })
        );
    }

    #[test]
    fn rejects_overlapping_ancilla() {
        let g = Gate::mct(&[0, 1, 2], 3).unwrap();
        assert!(decompose_mct(&g, QubitId(3), 5).is_err());
    }
}
