//! Quantum state simulation.
//!
//! Two backends are provided. [`GhzPhaseState`] tracks states on the GHZ
//! manifold `(|0ⁿ⟩ + e^{iφ}|1ⁿ⟩)/√2` exactly, with `φ` a dyadic multiple of
//! `π` held as an integer. [`DenseState`] is a plain amplitude vector used as
//! the oracle for the phase backend and for teleportation.

mod dense;
mod ghz;
mod measurement;

pub use dense::qubit_fidelity;
pub use dense::{DenseState, Gate, DEFAULT_DENSE_LIMIT};
pub use ghz::{GhzPhaseState, MAX_DENOM_EXP};
pub use measurement::MeasurementRecord;

/// Hamming weight parity of a bit slice.
pub fn parity(bits: &[u8]) -> u8 {
    bits.iter().fold(0, |acc, b| acc ^ (b & 1))
}
