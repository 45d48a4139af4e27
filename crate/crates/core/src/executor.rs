// SPDX-License-Identifier: Apache-2.0

//! Block-chained execution with argmax filtering.
//!
//! Block 0 runs on the caller's input. Every later block starts from an
//! all-zero register with X gates on the qubits where the previous block's
//! most frequent outcome had a 1. Those preparation gates are noisy like any
//! other one-qubit gate.

use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, Gate, GateKind};
use crate::error::{Error, Result};
use crate::mapper::{route, RoutingOptions};
use crate::sim::{argmax_outcome, derive_seed, simulate_noisy, BitString, Counts, NoiseModel};
use crate::slicer::{Block, SlicePlan};

const CHAIN_LABEL: u64 = 1 << 32;
const INIT_LABEL: u64 = u64::MAX;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JobRecord {
    /// Which superposition input this job belongs to; 0 for classical runs.
    pub chain: usize,
    pub block_index: usize,
    /// Expected register value at the start of the block.
    pub input: BitString,
    pub shots: u64,
    pub swaps: usize,
    pub counts: Counts,
    pub argmax: BitString,
}

/// One classical input pushed through the plan in superposition mode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainRecord {
    pub input: BitString,
    /// Observed count of this input after the preparation run.
    pub observed: u64,
    pub shots: u64,
    pub final_counts: Counts,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DcRunReport {
    pub mode: String,
    pub source: String,
    pub block_count: usize,
    pub job_count: usize,
    /// Preparation run in superposition mode.
    pub init_job: Option<JobRecord>,
    pub chains: Vec<ChainRecord>,
    pub jobs: Vec<JobRecord>,
    pub final_counts: Counts,
    pub warnings: Vec<String>,
}

impl DcRunReport {
    pub fn final_argmax(&self) -> Result<BitString> {
        argmax_outcome(&self.final_counts)
    }

    pub fn argmax_chain(&self) -> Vec<BitString> {
        self.jobs.iter().map(|j| j.argmax.clone()).collect()
    }
}

pub struct SuperpositionSpec {
    pub init_circuit: Circuit,
    /// Number of expected outcomes of the preparation circuit.
    pub k: usize,
    pub total_shots: u64,
}

impl SuperpositionSpec {
    /// Hadamard on qubit 0 followed by a CNOT ladder over `width` qubits.
    pub fn ghz(width: usize, total_shots: u64) -> Self {
        let mut init = Circuit::new("ghz", width);
        if width > 0 {
            init.extend(std::iter::once(Gate::h(0)));
            init.extend((1..width).map(|q| Gate::cnot(q - 1, q)));
        }
        Self {
            init_circuit: init,
            k: 2,
            total_shots,
        }
    }
}

fn block_seed(nm: &NoiseModel, block: usize) -> NoiseModel {
    if block == 0 {
        *nm
    } else {
        nm.with_seed(derive_seed(nm.seed, block as u64))
    }
}

fn normalize_input(plan: &SlicePlan, input: &BitString) -> Result<BitString> {
    if input.width() != plan.width() && input.width() != plan.logical_width() {
        return Err(Error::WidthMismatch {
            expected: plan.logical_width(),
            found: input.width(),
        });
    }
    input.padded(plan.width())
}

/// Circuit that realizes `expected` from an all-zero register, then runs `body`.
fn prepared(body: &Circuit, expected: &BitString) -> Circuit {
    let mut c = Circuit::new(body.name(), body.width());
    c.extend((0..expected.width()).filter(|&q| expected.get(q)).map(Gate::x));
    c.extend(body.gates().iter().cloned());
    c
}

fn run_block(
    plan: &SlicePlan,
    block: &Block,
    expected: &BitString,
    shots: u64,
    nm: &NoiseModel,
    routing: Option<&RoutingOptions>,
) -> Result<(Counts, usize)> {
    let body = plan.block_circuit(block.index);
    let (circuit, input) = if block.index == 0 {
        (body, expected.clone())
    } else {
        (prepared(&body, expected), BitString::zeros(plan.width()))
    };
    let Some(opts) = routing else {
        return Ok((simulate_noisy(&circuit, &input, shots, nm)?, 0));
    };
    let routed = route(&circuit, &opts.coupling_map, opts.layout, opts.router)?;
    let physical = simulate_noisy(&routed.circuit, &routed.physical_input(&input), shots, nm)?;
    let logical = physical
        .iter()
        .map(|(k, n)| (routed.logical_output(k), n))
        .collect();
    Ok((logical, routed.swap_count))
}

/// Runs the plan as a chain of jobs, `shots` shots each.
pub fn run_dc(plan: &SlicePlan, input: &BitString, shots: u64, nm: &NoiseModel) -> Result<DcRunReport> {
    run_dc_with(plan, input, shots, nm, None)
}

/// [`run_dc`], routing every block onto a coupling map before execution.
pub fn run_dc_with(
    plan: &SlicePlan,
    input: &BitString,
    shots: u64,
    nm: &NoiseModel,
    routing: Option<&RoutingOptions>,
) -> Result<DcRunReport> {
    let jobs = run_chain(plan, input, shots, nm, routing, 0)?;
    let final_counts = jobs.last().map(|j| j.counts.clone()).unwrap_or_default();
    let mut warnings = Vec::new();
    if plan.floor_hit() {
        warnings.push("a single-gate block missed the fidelity threshold".to_string());
    }
    Ok(DcRunReport {
        mode: plan.mode().to_string(),
        source: plan.name().to_string(),
        block_count: plan.blocks().len(),
        job_count: jobs.len(),
        init_job: None,
        chains: Vec::new(),
        jobs,
        final_counts,
        warnings,
    })
}

fn run_chain(
    plan: &SlicePlan,
    input: &BitString,
    shots: u64,
    nm: &NoiseModel,
    routing: Option<&RoutingOptions>,
    chain: usize,
) -> Result<Vec<JobRecord>> {
    if plan.blocks().is_empty() {
        return Err(Error::EmptyPlan);
    }
    if shots == 0 {
        return Err(Error::ZeroShots);
    }
    let mut expected = normalize_input(plan, input)?;
    let mut jobs = Vec::with_capacity(plan.blocks().len());
    for block in plan.blocks() {
        let (counts, swaps) = run_block(plan, block, &expected, shots, &block_seed(nm, block.index), routing)?;
        let argmax = argmax_outcome(&counts)?;
        jobs.push(JobRecord {
            chain,
            block_index: block.index,
            input: expected,
            shots,
            swaps,
            counts,
            argmax: argmax.clone(),
        });
        expected = argmax;
    }
    Ok(jobs)
}

/// The whole circuit as a single job.
pub fn run_baseline(circuit: &Circuit, input: &BitString, shots: u64, nm: &NoiseModel) -> Result<DcRunReport> {
    run_dc(&SlicePlan::whole(circuit)?, input, shots, nm)
}

/// Reverses block order and the gate order inside every block.
///
/// Every gate in the IR is self-inverse, so running the result from the
/// forward run's final output recovers the forward input.
pub fn reverse_dc(plan: &SlicePlan) -> Result<SlicePlan> {
    let source = plan.circuit();
    if let Some(g) = source.gates().iter().find(|g| matches!(g.kind(), GateKind::Measure | GateKind::H)) {
        return Err(Error::InvalidGate(format!(
            "{} cannot be reversed; blocks must be measure-free",
            g.kind().name()
        )));
    }
    let reversed = source.inverse()?;
    let total = source.len();
    let blocks = plan
        .blocks()
        .iter()
        .rev()
        .enumerate()
        .map(|(i, b)| Block {
            index: i,
            start: total - b.end,
            end: total - b.start,
            weight: b.weight,
        })
        .collect();
    Ok(SlicePlan::from_parts(
        plan.mode(),
        reversed,
        plan.logical_width(),
        blocks,
        plan.floor_hit(),
        !plan.is_reversed(),
    ))
}

/// Splits `total` shots in proportion to `observed`, largest remainders
/// first (ties to the lower index), so the result sums to `total` exactly.
pub fn allocate_shots(observed: &[u64], total: u64) -> Result<Vec<u64>> {
    let sum: u128 = observed.iter().map(|&n| u128::from(n)).sum();
    if sum == 0 {
        return Err(Error::EmptyCounts);
    }
    let scaled: Vec<(u128, u128)> = observed
        .iter()
        .map(|&n| {
            let q = u128::from(n) * u128::from(total);
            (q / sum, q % sum)
        })
        .collect();
    let mut shots: Vec<u64> = scaled.iter().map(|&(f, _)| f as u64).collect();
    let assigned: u64 = shots.iter().sum();
    let mut order: Vec<usize> = (0..observed.len()).collect();
    order.sort_by(|&a, &b| scaled[b].1.cmp(&scaled[a].1).then(a.cmp(&b)));
    for &i in order.iter().take((total - assigned) as usize) {
        shots[i] += 1;
    }
    Ok(shots)
}

/// Superposition inputs: run the preparation circuit, keep the `k` most
/// frequent outcomes as inputs, split the shot budget by their observed
/// frequencies, push each through the plan and merge the final counts.
pub fn run_superposition(spec: &SuperpositionSpec, plan: &SlicePlan, nm: &NoiseModel) -> Result<DcRunReport> {
    run_superposition_with(spec, plan, nm, None)
}

pub fn run_superposition_with(
    spec: &SuperpositionSpec,
    plan: &SlicePlan,
    nm: &NoiseModel,
    routing: Option<&RoutingOptions>,
) -> Result<DcRunReport> {
    if spec.k == 0 {
        return Err(Error::Config("superposition needs k >= 1".into()));
    }
    if spec.total_shots == 0 {
        return Err(Error::ZeroShots);
    }
    let init_width = spec.init_circuit.width();
    if init_width != plan.width() && init_width != plan.logical_width() {
        return Err(Error::WidthMismatch {
            expected: plan.logical_width(),
            found: init_width,
        });
    }
    let init = spec.init_circuit.widened(plan.width())?;
    let init_nm = nm.with_seed(derive_seed(nm.seed, INIT_LABEL));
    let zeros = BitString::zeros(plan.width());
    let init_counts = simulate_noisy(&init, &zeros, spec.total_shots, &init_nm)?;
    let init_argmax = argmax_outcome(&init_counts)?;

    let mut warnings = Vec::new();
    let ranked = init_counts.ranked();
    if spec.k > ranked.len() {
        warnings.push(format!(
            "k = {} exceeds the {} distinct prepared outcomes; using {}",
            spec.k,
            ranked.len(),
            ranked.len()
        ));
    }
    let selected: Vec<(BitString, u64)> = ranked
        .into_iter()
        .take(spec.k)
        .map(|(b, n)| (b.clone(), n))
        .collect();
    let observed: Vec<u64> = selected.iter().map(|(_, n)| *n).collect();
    let shots = allocate_shots(&observed, spec.total_shots)?;

    let mut chains = Vec::new();
    let mut jobs = Vec::new();
    let mut final_counts = Counts::new();
    for (i, ((input, n), s)) in selected.into_iter().zip(shots).enumerate() {
        if s == 0 {
            warnings.push(format!("input {input} received no shots and was dropped"));
            continue;
        }
        let chain_nm = if i == 0 { *nm } else { nm.with_seed(derive_seed(nm.seed, CHAIN_LABEL + i as u64)) };
        let chain_jobs = run_chain(plan, &input, s, &chain_nm, routing, chains.len())?;
        let last = chain_jobs.last().expect("non-empty plan").counts.clone();
        final_counts.merge(&last);
        chains.push(ChainRecord {
            input,
            observed: n,
            shots: s,
            final_counts: last,
        });
        jobs.extend(chain_jobs);
    }
    if plan.floor_hit() {
        warnings.push("a single-gate block missed the fidelity threshold".to_string());
    }
    Ok(DcRunReport {
        mode: plan.mode().to_string(),
        source: plan.name().to_string(),
        block_count: plan.blocks().len(),
        job_count: jobs.len() + 1,
        init_job: Some(JobRecord {
            chain: 0,
            block_index: 0,
            input: zeros,
            shots: spec.total_shots,
            swaps: 0,
            counts: init_counts,
            argmax: init_argmax,
        }),
        chains,
        jobs,
        final_counts,
        warnings,
    })
}

/// The plan's circuit as one job, with bare measurements of every qubit at
/// each block boundary and no argmax re-initialization.
pub fn with_boundary_measures(plan: &SlicePlan) -> Circuit {
    let source = plan.circuit();
    let mut c = Circuit::new(source.name(), source.width());
    let last = plan.blocks().len().saturating_sub(1);
    for block in plan.blocks() {
        c.extend(source.gates()[block.range()].iter().cloned());
        if block.index < last {
            c.extend((0..source.width()).map(|q| Gate::measure(q, q)));
        }
    }
    c
}
