// SPDX-License-Identifier: Apache-2.0

use crate::circuit::Circuit;

/// ASAP layering of a circuit's gates.
///
/// Each layer holds gate indices whose operand sets are pairwise disjoint.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DagLayers {
    layers: Vec<Vec<usize>>,
}

impl DagLayers {
    pub fn layers(&self) -> &[Vec<usize>] {
        &self.layers
    }

    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    /// Gate indices in layer order.
    pub fn order(&self) -> impl Iterator<Item = usize> + '_ {
        self.layers.iter().flatten().copied()
    }
}

/// Places each gate one layer after the latest layer of any gate sharing a qubit.
pub fn dag_layers(circuit: &Circuit) -> DagLayers {
    let mut frontier = vec![0usize; circuit.width()];
    let mut layers: Vec<Vec<usize>> = Vec::new();
    for (idx, gate) in circuit.gates().iter().enumerate() {
        let layer = gate.qubits().map(|q| frontier[q.0]).max().unwrap_or(0);
        if layer == layers.len() {
            layers.push(Vec::new());
        }
        layers[layer].push(idx);
        for q in gate.qubits() {
            frontier[q.0] = layer + 1;
        }
    }
    DagLayers { layers }
}
