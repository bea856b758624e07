use num_complex::Complex64;

use super::{ae_establish, anon_send, RandomnessLedger, Transcript};
use crate::error::{ensure, Error, Result};
use crate::qsim::{DenseState, Gate};
use crate::rng::RngStream;

#[derive(Debug, Clone)]
pub struct AnonqOutcome {
    /// Receiver's qubit after correction.
    pub received: (Complex64, Complex64),
    /// `|⟨φ|received⟩|²`.
    pub fidelity: f64,
    /// Sender's Bell outcomes `(m0, m1)`.
    pub bell_outcomes: (u8, u8),
    pub transcript: Transcript,
    pub ledger: RandomnessLedger,
}

/// Anonymous qubit transmission: teleportation over anonymous entanglement,
/// with both correction bits sent through ANON.
///
/// The Bell outcomes are ANON data items and so are not entered in the
/// sender's ledger.
pub fn anonq_send(
    n: usize,
    sender: usize,
    receiver: usize,
    input: (Complex64, Complex64),
    rng: &mut RngStream,
) -> Result<AnonqOutcome> {
    let norm = input.0.norm_sqr() + input.1.norm_sqr();
    ensure!(
        (norm - 1.0).abs() <= 1e-10,
        "input qubit is not normalized (|α|²+|β|² = {norm})"
    );

    let ae = ae_establish(n, sender, receiver, rng)?;
    let mut transcript = ae.transcript;
    let mut ledger = ae.ledger;

    // qubit 0: input, qubit 1: sender's half, qubit 2: receiver's half
    let mut state = DenseState::product(&[input])?.tensor(&ae.epr.to_dense()?)?;
    let (m0, m1) = state.bell_measure(0, 1, rng)?;

    let mut decoded = [0u8; 2];
    for (slot, bit) in decoded.iter_mut().zip([m0, m1]) {
        let run = anon_send(n, sender, bit, rng)?;
        transcript.extend(run.transcript);
        ledger.append(run.ledger);
        *slot = run.decoded.ok_or_else(|| Error::invalid("ANON sub-run aborted"))?;
    }

    // Receiver undoes X^{m1} Z^{m0}: X^{m1} first, then Z^{m0}.
    if decoded[1] == 1 {
        state.apply(&Gate::pauli_x(), &[2])?;
    }
    if decoded[0] == 1 {
        state.apply(&Gate::pauli_z(), &[2])?;
    }
    let received = state.qubit_state(2)?;
    let fidelity = crate::qsim::qubit_fidelity(input, received);
    Ok(AnonqOutcome {
        received,
        fidelity,
        bell_outcomes: (m0, m1),
        transcript,
        ledger,
    })
}
