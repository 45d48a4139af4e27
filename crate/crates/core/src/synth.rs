// SPDX-License-Identifier: Apache-2.0

//! Seeded synthetic circuits: random reversible circuits for property
//! checks and a small corpus at the weight scale of common reversible
//! benchmarks (about 200 to 300 weighted gates).

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::circuit::{gate_weight, Circuit, Gate};
use crate::sim::BitString;

/// Relative frequencies of the gate kinds drawn by [`random_circuit`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GateMix {
    pub x: u32,
    pub cnot: u32,
    pub toffoli: u32,
    pub mct: u32,
    /// Largest MCT control count drawn (at least 3).
    pub max_controls: usize,
}

impl GateMix {
    pub const CNOT_ONLY: GateMix = GateMix { x: 0, cnot: 1, toffoli: 0, mct: 0, max_controls: 3 };
    pub const MIXED: GateMix = GateMix { x: 3, cnot: 5, toffoli: 3, mct: 1, max_controls: 6 };
    pub const ARITHMETIC: GateMix = GateMix { x: 1, cnot: 3, toffoli: 4, mct: 0, max_controls: 3 };
}

/// Draws gates until the circuit weight reaches `weight` (never exceeds it).
///
/// MCT gates need at least four qubits; narrower circuits fall back to
/// Toffoli or CNOT draws.
pub fn random_circuit(seed: u64, name: &str, width: usize, weight: usize, mix: GateMix) -> Circuit {
    assert!(width >= 2, "random circuits need two qubits");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut c = Circuit::new(name, width);
    let total = mix.x + mix.cnot + mix.toffoli + mix.mct;
    assert!(total > 0, "empty gate mix");
    let mut acc = 0;
    // X gates weigh nothing; cap them so the loop terminates on X-heavy mixes.
    let mut free_draws = 0;
    while acc < weight {
        let room = weight - acc;
        let mut pick = rng.random_range(0..total);
        let gate = if pick < mix.x {
            free_draws += 1;
            if free_draws > 4 * weight + 16 {
                continue;
            }
            Gate::x(rng.random_range(0..width))
        } else {
            pick -= mix.x;
            let max_k = mix.max_controls.min(width - 1).min((room + 3) / 2);
            let kind = if pick < mix.cnot {
                1
            } else if pick < mix.cnot + mix.toffoli {
                2
            } else if max_k >= 3 {
                rng.random_range(3..=max_k)
            } else {
                2
            };
            let k = kind.min(width - 1);
            let qs = sample(&mut rng, width, k + 1).into_vec();
            match k {
                1 => Gate::cnot(qs[0], qs[1]),
                2 => Gate::toffoli(qs[0], qs[1], qs[2]),
                _ => Gate::mct(&qs[..k], qs[k]).expect("distinct operands"),
            }
        };
        acc += gate_weight(&gate);
        c.extend(std::iter::once(gate));
    }
    c
}

pub fn random_input(seed: u64, width: usize) -> BitString {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_1a7e);
    BitString::from_bits((0..width).map(|_| rng.random_bool(0.5)).collect())
}

#[derive(Debug, Clone)]
pub struct CorpusEntry {
    pub circuit: Circuit,
    pub input: BitString,
}

/// Six circuits shaped like the usual reversible benchmark picks: five
/// CNOT-only circuits on 5 to 16 qubits and a 25-qubit Toffoli-heavy
/// arithmetic circuit, each with a fixed pseudo-random classical input.
pub fn benchmark_corpus() -> Vec<CorpusEntry> {
    const SHAPES: [(&str, usize, usize, GateMix); 6] = [
        ("alu-cx", 5, 225, GateMix::CNOT_ONLY),
        ("c17-cx", 7, 205, GateMix::CNOT_ONLY),
        ("cm82a-cx", 8, 285, GateMix::CNOT_ONLY),
        ("ex2-cx", 7, 275, GateMix::CNOT_ONLY),
        ("multiplier-25", 25, 200, GateMix::ARITHMETIC),
        ("qft16-cx", 16, 240, GateMix::CNOT_ONLY),
    ];
    SHAPES
        .iter()
        .enumerate()
        .map(|(i, &(name, width, weight, mix))| {
            let seed = 0xC0_4B05 + i as u64;
            CorpusEntry {
                circuit: random_circuit(seed, name, width, weight, mix),
                input: random_input(seed, width),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::GateKind;

    #[test]
    fn exact_weight_and_determinism() {
        for seed in 0..20 {
            let c = random_circuit(seed, "r", 3 + seed as usize % 10, 150, GateMix::MIXED);
            assert_eq!(c.weight(), 150);
            assert_eq!(c, random_circuit(seed, "r", 3 + seed as usize % 10, 150, GateMix::MIXED));
        }
    }

    #[test]
    fn narrow_circuits_have_no_mct() {
        let c = random_circuit(1, "n", 3, 100, GateMix::MIXED);
        assert!(c.gates().iter().all(|g| g.kind() != GateKind::Mct));
        let c = random_circuit(1, "w", 2, 50, GateMix::MIXED);
        assert!(c.gates().iter().all(|g| g.arity() <= 2));
    }

    #[test]
    fn corpus_shape() {
        let corpus = benchmark_corpus();
        let weights: Vec<usize> = corpus.iter().map(|e| e.circuit.weight()).collect();
        assert_eq!(weights, [225, 205, 285, 275, 200, 240]);
        assert!(corpus.iter().all(|e| e.input.width() == e.circuit.width()));
    }
}
