// SPDX-License-Identifier: Apache-2.0

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{BitString, Counts, NoiseModel};
use crate::circuit::{gate_weight, Circuit, Gate, GateKind};
use crate::dag::dag_layers;
use crate::error::{Error, Result};

fn check_width(circuit: &Circuit, input: &BitString) -> Result<()> {
    if input.width() != circuit.width() {
        return Err(Error::WidthMismatch {
            expected: circuit.width(),
            found: input.width(),
        });
    }
    Ok(())
}

/// Noiseless classical evaluation. Measurements are identities here.
pub fn simulate_ideal(circuit: &Circuit, input: &BitString) -> Result<BitString> {
    check_width(circuit, input)?;
    let mut bits = input.clone().into_bits();
    for gate in circuit.gates() {
        apply_ideal(gate, &mut bits)?;
    }
    Ok(BitString::from_bits(bits))
}

fn apply_ideal(gate: &Gate, bits: &mut [bool]) -> Result<()> {
    let t = gate.target().0;
    match gate.kind() {
        GateKind::X => bits[t] = !bits[t],
        GateKind::Cnot | GateKind::Toffoli | GateKind::Mct => {
            if gate.controls().iter().all(|c| bits[c.0]) {
                bits[t] = !bits[t];
            }
        }
        GateKind::Swap => bits.swap(gate.controls()[0].0, t),
        GateKind::Measure => {}
        GateKind::H => {
            return Err(Error::NonClassical(
                "h has no deterministic classical outcome".into(),
            ))
        }
    }
    Ok(())
}

/// Drops measurements that are the last operation on their qubit; the
/// final readout already measures every qubit.
pub(crate) fn strip_trailing_measures(circuit: &Circuit) -> Circuit {
    let mut last_use = vec![None; circuit.width()];
    for (i, g) in circuit.gates().iter().enumerate() {
        for q in g.qubits() {
            last_use[q.0] = Some(i);
        }
    }
    let kept = circuit
        .gates()
        .iter()
        .enumerate()
        .filter(|(i, g)| !(g.kind() == GateKind::Measure && last_use[g.target().0] == Some(*i)))
        .map(|(_, g)| g.clone())
        .collect();
    Circuit::from_gates(circuit.name(), circuit.width(), kept).expect("subset of a valid circuit")
}

/// One gate with its noise channel resolved.
#[derive(Debug, Clone)]
pub(crate) struct Op {
    pub kind: GateKind,
    pub controls: Vec<usize>,
    pub target: usize,
    /// Independent flip rounds applied to every operand after the gate.
    pub rounds: u32,
    pub eps: f64,
}

impl Op {
    fn operands(&self) -> impl Iterator<Item = usize> + '_ {
        self.controls.iter().copied().chain(std::iter::once(self.target))
    }
}

/// A circuit lowered to layered ops with idle sets, ready for replay.
#[derive(Debug, Clone)]
pub(crate) struct Program {
    pub layers: Vec<Vec<Op>>,
    pub idle: Vec<Vec<usize>>,
    pub eps_meas: f64,
    pub decay: f64,
}

impl Program {
    /// Trailing measurements (last op on their qubit) are folded into the
    /// final readout. Mid-circuit measurements stay as ops.
    /// `H` must be the first gate on its qubit.
    pub fn compile(circuit: &Circuit, nm: &NoiseModel) -> Result<Self> {
        nm.validate()?;
        let width = circuit.width();
        let stripped = strip_trailing_measures(circuit);

        let mut touched = vec![false; width];
        for g in stripped.gates() {
            if g.kind() == GateKind::H && touched[g.target().0] {
                return Err(Error::NonClassical(format!(
                    "h on {} after other gates cannot be sampled classically",
                    g.target()
                )));
            }
            for q in g.qubits() {
                touched[q.0] = true;
            }
        }

        let dag = dag_layers(&stripped);
        let mut layers = Vec::with_capacity(dag.depth());
        let mut idle = Vec::with_capacity(dag.depth());
        for layer in dag.layers() {
            let mut busy = vec![false; width];
            let ops: Vec<Op> = layer
                .iter()
                .map(|&i| {
                    let g = &stripped.gates()[i];
                    for q in g.qubits() {
                        busy[q.0] = true;
                    }
                    lower(g, nm)
                })
                .collect();
            idle.push((0..width).filter(|&q| !busy[q]).collect());
            layers.push(ops);
        }
        Ok(Self {
            layers,
            idle,
            eps_meas: nm.eps_meas,
            decay: nm.idle_decay(),
        })
    }

    fn run_shot(&self, input: &[bool], rng: &mut impl Rng) -> BitString {
        let mut bits = input.to_vec();
        for (ops, idle) in self.layers.iter().zip(&self.idle) {
            for op in ops {
                match op.kind {
                    GateKind::X => bits[op.target] = !bits[op.target],
                    GateKind::H => bits[op.target] = rng.random_bool(0.5),
                    GateKind::Cnot | GateKind::Toffoli | GateKind::Mct => {
                        if op.controls.iter().all(|&c| bits[c]) {
                            bits[op.target] = !bits[op.target];
                        }
                    }
                    GateKind::Swap => bits.swap(op.controls[0], op.target),
                    GateKind::Measure => {}
                }
                if op.eps > 0.0 {
                    for _ in 0..op.rounds {
                        for q in op.operands() {
                            if rng.random_bool(op.eps) {
                                bits[q] = !bits[q];
                            }
                        }
                    }
                }
            }
            if self.decay > 0.0 {
                for &q in idle {
                    if bits[q] && rng.random_bool(self.decay) {
                        bits[q] = false;
                    }
                }
            }
        }
        if self.eps_meas > 0.0 {
            for b in bits.iter_mut() {
                if rng.random_bool(self.eps_meas) {
                    *b = !*b;
                }
            }
        }
        BitString::from_bits(bits)
    }
}

pub(crate) fn lower(gate: &Gate, nm: &NoiseModel) -> Op {
    let (rounds, eps) = match gate.kind() {
        GateKind::X | GateKind::H => (1, nm.eps_1q),
        GateKind::Measure => (1, nm.eps_meas),
        _ => (gate_weight(gate) as u32, nm.eps_2q),
    };
    Op {
        kind: gate.kind(),
        controls: gate.controls().iter().map(|q| q.0).collect(),
        target: gate.target().0,
        rounds,
        eps,
    }
}

/// Shot-based noisy replay in DAG-layer order.
///
/// After every gate each operand flips independently (one round per
/// CNOT-equivalent of the gate); after every layer each idle qubit holding
/// 1 decays with probability `1 - exp(-1 / t1_layers)`; mid-circuit
/// measurements flip the measured bit with `eps_meas`, and the final
/// readout flips every bit with `eps_meas`.
///
/// Shot `i` draws from ChaCha8 seeded with `nm.seed` on stream `i`, so the
/// result does not depend on how shots are scheduled across threads.
pub fn simulate_noisy(
    circuit: &Circuit,
    input: &BitString,
    shots: u64,
    nm: &NoiseModel,
) -> Result<Counts> {
    check_width(circuit, input)?;
    if shots == 0 {
        return Err(Error::ZeroShots);
    }
    let program = Program::compile(circuit, nm)?;
    let bits = input.bits();
    let seed = nm.seed;
    let histogram = (0..shots)
        .into_par_iter()
        .fold(BTreeMap::new, |mut acc: BTreeMap<BitString, u64>, shot| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(shot);
            *acc.entry(program.run_shot(bits, &mut rng)).or_insert(0) += 1;
            acc
        })
        .reduce(BTreeMap::new, |mut a, b| {
            for (k, n) in b {
                *a.entry(k).or_insert(0) += n;
            }
            a
        });
    Ok(Counts::from_map(histogram))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bits(s: &str) -> BitString {
        s.parse().unwrap()
    }

    #[test]
    fn and_truth_table() {
        let and = Circuit::from_gates("and", 3, vec![Gate::toffoli(0, 1, 2)]).unwrap();
        for x in 0..4u64 {
            let out = simulate_ideal(&and, &BitString::from_u64(x, 3)).unwrap();
            assert_eq!(out.get(2), x == 3, "input {x}");
        }
    }

    #[test]
    fn nand_truth_table() {
        let nand = Circuit::from_gates("nand", 3, vec![Gate::x(2), Gate::toffoli(0, 1, 2)]).unwrap();
        for x in 0..4u64 {
            let out = simulate_ideal(&nand, &BitString::from_u64(x, 3)).unwrap();
            assert_eq!(out.get(2), x != 3, "input {x}");
        }
    }

    #[test]
    fn empty_circuit_is_identity() {
        let c = Circuit::new("e", 3);
        assert_eq!(simulate_ideal(&c, &bits("101")).unwrap(), bits("101"));
    }

    #[test]
    fn width_mismatch_and_zero_shots() {
        let c = Circuit::new("e", 3);
        assert!(matches!(
            simulate_ideal(&c, &bits("01")),
            Err(Error::WidthMismatch { .. })
        ));
        assert_eq!(
            simulate_noisy(&c, &bits("001"), 0, &NoiseModel::noiseless(0)),
            Err(Error::ZeroShots)
        );
    }

    #[test]
    fn noiseless_counts_concentrate() {
        let c = Circuit::from_gates("c", 3, vec![Gate::x(0), Gate::toffoli(0, 2, 1)]).unwrap();
        let counts = simulate_noisy(&c, &bits("100"), 500, &NoiseModel::noiseless(3)).unwrap();
        assert_eq!(counts.len(), 1);
        assert_eq!(counts.get(&bits("111")), 500);
    }

    #[test]
    fn single_x_flip_rate_is_binomial() {
        let p = 0.1;
        let shots = 20_000u64;
        let c = Circuit::from_gates("x", 1, vec![Gate::x(0)]).unwrap();
        let nm = NoiseModel::new(p, 0.0, 0.0, f64::INFINITY, 11).unwrap();
        let counts = simulate_noisy(&c, &bits("0"), shots, &nm).unwrap();
        let flipped = counts.get(&bits("0")) as f64;
        let mean = p * shots as f64;
        let sigma = (shots as f64 * p * (1.0 - p)).sqrt();
        assert!((flipped - mean).abs() <= 4.0 * sigma, "{flipped} vs {mean}");
    }

    #[test]
    fn readout_flip_rate_is_binomial() {
        let p = 0.05;
        let shots = 20_000u64;
        let c = Circuit::new("idle", 1);
        let nm = NoiseModel::new(0.0, 0.0, p, f64::INFINITY, 5).unwrap();
        let counts = simulate_noisy(&c, &bits("1"), shots, &nm).unwrap();
        let flipped = counts.get(&bits("0")) as f64;
        let sigma = (shots as f64 * p * (1.0 - p)).sqrt();
        assert!((flipped - p * shots as f64).abs() <= 4.0 * sigma);
    }

    #[test]
    fn idle_decay_only_lowers_ones() {
        // qubit 1 idles for 20 layers while qubit 0 is busy.
        let mut c = Circuit::new("idle", 2);
        c.extend((0..20).map(|_| Gate::x(0)));
        let nm = NoiseModel::new(0.0, 0.0, 0.0, 10.0, 1).unwrap();
        let counts = simulate_noisy(&c, &bits("10"), 4000, &nm).unwrap();
        let survived = counts.get(&bits("10")) as f64 / 4000.0;
        let expected = (-20.0f64 / 10.0).exp();
        let sigma = (expected * (1.0 - expected) / 4000.0).sqrt();
        assert!((survived - expected).abs() < 4.0 * sigma, "{survived} vs {expected}");
        let zeros = simulate_noisy(&c, &bits("00"), 1000, &nm).unwrap();
        assert_eq!(zeros.get(&bits("00")), 1000);
    }

    #[test]
    fn trailing_measure_is_readout_only() {
        let with = Circuit::from_gates("m", 2, vec![Gate::cnot(0, 1), Gate::measure(1, 1)]).unwrap();
        let without = Circuit::from_gates("m", 2, vec![Gate::cnot(0, 1)]).unwrap();
        let nm = NoiseModel::new(0.0, 0.02, 0.05, f64::INFINITY, 2).unwrap();
        assert_eq!(
            simulate_noisy(&with, &bits("01"), 2000, &nm).unwrap(),
            simulate_noisy(&without, &bits("01"), 2000, &nm).unwrap()
        );
    }

    #[test]
    fn hadamard_on_fresh_qubit_is_a_fair_coin() {
        let ghz = Circuit::from_gates("ghz", 3, vec![Gate::h(0), Gate::cnot(0, 1), Gate::cnot(1, 2)])
            .unwrap();
        let counts = simulate_noisy(&ghz, &bits("000"), 4000, &NoiseModel::noiseless(9)).unwrap();
        assert_eq!(counts.len(), 2);
        let n0 = counts.get(&bits("000")) as f64;
        assert!((n0 - 2000.0).abs() < 4.0 * 1000f64.sqrt());
        let late = Circuit::from_gates("bad", 2, vec![Gate::cnot(0, 1), Gate::h(0)]).unwrap();
        assert!(matches!(
            simulate_noisy(&late, &bits("00"), 1, &NoiseModel::noiseless(0)),
            Err(Error::NonClassical(_))
        ));
        assert!(simulate_ideal(&ghz, &bits("000")).is_err());
    }

    #[test]
    fn seeded_runs_repeat() {
        let c = Circuit::from_gates("c", 3, vec![Gate::toffoli(0, 1, 2), Gate::cnot(2, 0)]).unwrap();
        let nm = NoiseModel::new(0.01, 0.05, 0.02, 20.0, 42).unwrap();
        let a = simulate_noisy(&c, &bits("011"), 3000, &nm).unwrap();
        let b = simulate_noisy(&c, &bits("011"), 3000, &nm).unwrap();
        assert_eq!(a, b);
        let other = simulate_noisy(&c, &bits("011"), 3000, &nm.with_seed(43)).unwrap();
        assert_ne!(a, other);
    }
}
