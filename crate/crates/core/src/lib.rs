// SPDX-License-Identifier: Apache-2.0

//! Depth control for quantum-classical circuits.
//!
//! A reversible classical circuit is sliced into blocks small enough that
//! each block's correct output is its most frequent measured outcome. Each
//! block is run as its own job, the argmax outcome re-initializes the next
//! block through X gates, and the output error is confined to that of the
//! last block instead of accumulating across the whole circuit.
//!
//! Modules:
//! - [`circuit`], [`qasm`], [`dag`], [`mct`]: IR, QASM subset, layering, MCT expansion
//! - [`sim`]: ideal and noisy shot simulation, analytic fidelity
//! - [`slicer`]: static (fixed weight budget) and dynamic (fidelity threshold) slicing
//! - [`executor`]: block-chained execution, reverse runs, superposition inputs
//! - [`mapper`]: coupling maps, layouts and SWAP routing
//! - [`metrics`], [`config`], [`experiment`]: PST / E-Max(F), run configs and reports

pub mod circuit;
pub mod config;
pub mod dag;
pub mod error;
pub mod executor;
pub mod experiment;
mod kv;
pub mod mapper;
pub mod mct;
pub mod metrics;
pub mod qasm;
pub mod sim;
pub mod slicer;
pub mod synth;

pub use circuit::{circuit_weight, gate_weight, Circuit, Gate, GateKind, QubitId};
pub use dag::{dag_layers, DagLayers};
pub use error::{Error, Result};
pub use executor::{
    allocate_shots, reverse_dc, run_baseline, run_dc, run_superposition, DcRunReport, JobRecord,
    SuperpositionSpec,
};
pub use mapper::{
    route, route_plan, swap_overhead_report, CouplingMap, LayoutPolicy, RoutedCircuit,
    RouterPolicy,
};
pub use mct::decompose_mct;
pub use metrics::{e_max_f, pst, pst_superposed, MetricsRow};
pub use qasm::{parse_qasm, parse_qasm_named, serialize_qasm};
pub use sim::{
    argmax_outcome, estimate_fidelity, simulate_ideal, simulate_noisy, BitString, Counts,
    NoiseModel,
};
pub use slicer::{plan_job_count, slice_dynamic, slice_static, Block, SliceMode, SlicePlan};
