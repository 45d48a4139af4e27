// SPDX-License-Identifier: Apache-2.0

//! Fixed inputs for the pipeline benchmarks.

use dc_core::synth::{benchmark_corpus, random_circuit, CorpusEntry, GateMix};
use dc_core::{Circuit, NoiseModel};

/// Noise comparable to a current superconducting device.
pub fn device_noise(seed: u64) -> NoiseModel {
    NoiseModel::new(0.0005, 0.01, 0.015, 400.0, seed).expect("valid noise")
}

pub fn mixed_circuit(width: usize, weight: usize) -> Circuit {
    random_circuit(0xBE7C, "bench", width, weight, GateMix::MIXED)
}

pub fn corpus() -> Vec<CorpusEntry> {
    benchmark_corpus()
}
