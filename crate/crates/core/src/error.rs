// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

/// Errors produced anywhere in the depth-control pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("line {line}: syntax error: {message}")]
    Syntax { line: usize, message: String },

    #[error("line {line}: unknown gate `{name}`")]
    UnknownGate { line: usize, name: String },

    #[error("qubit index {index} out of range for width {width}")]
    QubitOutOfRange { index: usize, width: usize },

    #[error("invalid gate: {0}")]
    InvalidGate(String),

    #[error("width mismatch: expected {expected}, found {found}")]
    WidthMismatch { expected: usize, found: usize },

    #[error("shot count must be at least 1")]
    ZeroShots,

    #[error("counts are empty")]
    EmptyCounts,

    #[error("circuit has no gates")]
    EmptyCircuit,

    #[error("plan has no blocks")]
    EmptyPlan,

    #[error("block budget must be at least 1, got {0}")]
    InvalidBudget(usize),

    #[error("fidelity threshold must lie in (0, 1), got {0}")]
    InvalidThreshold(f64),

    #[error("MCT decomposition needs {needed} ancillas, only {available} available")]
    InsufficientAncillas { needed: usize, available: usize },

    #[error("operation not supported on a classical simulator: {0}")]
    NonClassical(String),

    #[error("invalid noise model: {0}")]
    InvalidNoise(String),

    #[error("circuit needs {needed} physical qubits, coupling map has {available}")]
    InsufficientQubits { needed: usize, available: usize },

    #[error("physical qubits {from} and {to} are not connected")]
    Disconnected { from: usize, to: usize },

    #[error("invalid coupling map: {0}")]
    InvalidCouplingMap(String),

    #[error("invalid bitstring `{0}`")]
    InvalidBitString(String),

    #[error("config error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
