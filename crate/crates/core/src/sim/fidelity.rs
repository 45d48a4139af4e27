// SPDX-License-Identifier: Apache-2.0

use super::simulate::{lower, strip_trailing_measures};
use super::NoiseModel;
use crate::circuit::Circuit;
use crate::dag::dag_layers;

/// Analytic probability that a shot sees no error event at all.
///
/// Product of `(1 - eps)` over every operand flip round of every gate, the
/// decay survival `exp(-1 / t1_layers)` for every qubit-layer slot of the
/// layered circuit, and `(1 - eps_meas)` per mid-circuit measurement and per
/// qubit of the final readout. Decay is charged on busy slots too and
/// whether or not the qubit holds 1, which keeps the estimate non-increasing
/// as gates are appended.
pub fn estimate_fidelity(circuit: &Circuit, nm: &NoiseModel) -> f64 {
    let stripped = strip_trailing_measures(circuit);
    let dag = dag_layers(&stripped);
    let width = circuit.width();

    let mut log_f = 0.0f64;
    for gate in stripped.gates() {
        let op = lower(gate, nm);
        let exposures = (op.rounds as usize * gate.arity()) as f64;
        log_f += exposures * (1.0 - op.eps).ln();
    }
    if nm.t1_layers.is_finite() {
        log_f -= (dag.depth() * width) as f64 / nm.t1_layers;
    }
    log_f += width as f64 * (1.0 - nm.eps_meas).ln();
    log_f.exp().clamp(0.0, 1.0)
}
