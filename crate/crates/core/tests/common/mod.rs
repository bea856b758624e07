#![allow(dead_code)]

use std::f64::consts::PI;

use ghz_anon::qsim::{DenseState, Gate};
use ghz_anon::RngStream;
use num_complex::Complex64;

/// One step of a random phase program.
#[derive(Debug, Clone, Copy)]
pub enum Op {
    Flip(usize),
    Rz { player: usize, num: i64, exp: u32 },
    Measure,
}

/// Outcome distribution after `H^{⊗n}`, straight from the state vector.
pub fn dense_hadamard_distribution(state: &DenseState) -> Vec<f64> {
    let n = state.num_qubits();
    let mut s = state.clone();
    for q in 0..n {
        s.apply(&Gate::hadamard(), &[q]).unwrap();
    }
    s.probabilities()
}

/// Builds `(|0ⁿ⟩ + |1ⁿ⟩)/√2` gate by gate: H on qubit 0, then a CNOT ladder.
pub fn dense_ghz(n: usize) -> DenseState {
    let mut s = DenseState::new(n).unwrap();
    s.apply(&Gate::hadamard(), &[0]).unwrap();
    for q in 1..n {
        s.apply(&Gate::cnot(), &[q - 1, q]).unwrap();
    }
    s
}

pub fn rz_angle(num: i64, exp: u32) -> f64 {
    PI * num as f64 / (1u64 << exp) as f64
}

/// Outcome bits of basis index `x`, qubit 0 first.
pub fn index_bits(x: usize, n: usize) -> Vec<u8> {
    (0..n).map(|q| ((x >> (n - 1 - q)) & 1) as u8).collect()
}

/// Random normalized qubit `cos(θ/2)|0⟩ + e^{iφ} sin(θ/2)|1⟩`.
pub fn random_qubit(rng: &mut RngStream) -> (Complex64, Complex64) {
    let theta = (1.0 - 2.0 * rng.unit()).acos();
    let phi = 2.0 * PI * rng.unit();
    (
        Complex64::new((theta / 2.0).cos(), 0.0),
        Complex64::from_polar((theta / 2.0).sin(), phi),
    )
}

/// Replays an AE run on the full state vector using its broadcast bits: every
/// bystander is Hadamard-measured and projected onto its bit, the sender
/// flips on its coin, the receiver on coin ⊕ bystander parity. Returns the
/// fidelity with `|bystander bits⟩ ⊗ (|00⟩+|11⟩)/√2` on `(s, r)`.
pub fn ae_replay_fidelity(n: usize, s: usize, r: usize, bits: &[u8]) -> f64 {
    let mut state = dense_ghz(n);
    let mut measured_parity = 0;
    for j in (0..n).filter(|&j| j != s && j != r) {
        state.apply(&Gate::hadamard(), &[j]).unwrap();
        state.project(j, bits[j]).unwrap();
        measured_parity ^= bits[j];
    }
    if bits[s] == 1 {
        state.apply(&Gate::pauli_z(), &[s]).unwrap();
    }
    if bits[s] ^ measured_parity == 1 {
        state.apply(&Gate::pauli_z(), &[r]).unwrap();
    }
    let mut target = vec![Complex64::new(0.0, 0.0); 1 << n];
    for (idx, amp) in target.iter_mut().enumerate() {
        let bit = |q: usize| ((idx >> (n - 1 - q)) & 1) as u8;
        let others_match = (0..n).filter(|&j| j != s && j != r).all(|j| bit(j) == bits[j]);
        if others_match && bit(s) == bit(r) {
            *amp = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        }
    }
    state.fidelity(&DenseState::from_amplitudes(target).unwrap()).unwrap()
}
