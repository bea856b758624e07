use super::{check_index, BitString, Broadcast, RandomnessKind, RandomnessLedger, Transcript};
use crate::error::{ensure, Result};
use crate::qsim::{parity, GhzPhaseState};
use crate::rng::RngStream;

#[derive(Debug, Clone)]
pub struct AeOutcome {
    /// The pair shared by sender and receiver (sender's qubit first).
    pub epr: GhzPhaseState,
    pub transcript: Transcript,
    pub ledger: RandomnessLedger,
}

/// Anonymous entanglement between `sender` and `receiver`.
///
/// Every other player Hadamard-measures and broadcasts `m_j`. The sender
/// broadcasts a random `b` and flips iff `b = 1`; the receiver broadcasts a
/// random decoy `b′` and flips iff `b ⊕ (⊕ m_j) = 1`. Each player broadcasts
/// exactly one bit, so the transcript is a single round ordered by player id.
pub fn ae_establish(n: usize, sender: usize, receiver: usize, rng: &mut RngStream) -> Result<AeOutcome> {
    ensure!(n >= 3, "anonymous entanglement needs at least 3 players, got {n}");
    check_index(n, sender, "sender")?;
    check_index(n, receiver, "receiver")?;
    ensure!(sender != receiver, "sender and receiver must differ");

    let ghz = GhzPhaseState::new(n)?;
    let others: Vec<usize> = (0..n).filter(|&i| i != sender && i != receiver).collect();
    let (record, mut epr) = ghz.hadamard_measure_subset(&others, rng)?;

    let mut ledger = RandomnessLedger::new();
    let mut bits = vec![0u8; n];
    for (&j, &m) in others.iter().zip(record.outcomes()) {
        ledger.record(j, RandomnessKind::Measurement, m as u64);
        bits[j] = m;
    }

    let b = rng.bit();
    ledger.record(sender, RandomnessKind::Coin, b as u64);
    bits[sender] = b;
    if b == 1 {
        epr = epr.apply_phase_flip(0)?;
    }

    // b′ is never used; it only keeps the receiver's broadcast indistinguishable.
    let decoy = rng.bit();
    ledger.record(receiver, RandomnessKind::Decoy, decoy as u64);
    bits[receiver] = decoy;
    if b ^ parity(record.outcomes()) == 1 {
        epr = epr.apply_phase_flip(1)?;
    }

    let mut transcript = Transcript::new();
    let entries = bits
        .iter()
        .enumerate()
        .map(|(player, &bit)| Broadcast {
            player,
            bits: BitString::bit(bit),
        })
        .collect();
    transcript.push_round(entries, n);
    Ok(AeOutcome {
        epr,
        transcript,
        ledger,
    })
}
