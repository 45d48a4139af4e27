// SPDX-License-Identifier: Apache-2.0

//! Ideal and noisy shot simulation of reversible classical circuits.

mod bitstring;
mod counts;
mod fidelity;
mod noise;
mod simulate;

pub use bitstring::BitString;
pub use counts::{argmax_outcome, Counts};
pub use fidelity::estimate_fidelity;
pub use noise::{derive_seed, NoiseModel};
pub use simulate::{simulate_ideal, simulate_noisy};
