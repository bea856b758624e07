use super::players::Behavior;
use super::{
    check_index, check_index_set, BitString, Broadcast, PlayerConfig, RandomnessKind, RandomnessLedger, Role,
    Transcript,
};
use crate::error::{ensure, Result};
use crate::qsim::{parity, GhzPhaseState};
use crate::rng::RngStream;

#[derive(Debug, Clone)]
pub struct AnonOutcome {
    /// Decoded bit, `None` when the run aborted.
    pub decoded: Option<u8>,
    /// What each honest player concluded; `None` for dishonest players and aborted runs.
    pub player_decoded: Vec<Option<u8>>,
    pub transcript: Transcript,
    pub ledger: RandomnessLedger,
}

/// Shared measure-and-broadcast step: every player Hadamard-measures their
/// qubit of `state` and broadcasts the result. Returns the round's broadcasts;
/// withholding players are absent from it.
pub(crate) fn measure_and_broadcast(
    state: &GhzPhaseState,
    players: &[PlayerConfig],
    rng: &mut RngStream,
    ledger: &mut RandomnessLedger,
) -> Vec<Broadcast> {
    let record = state.hadamard_measure_all(rng);
    let mut entries = Vec::with_capacity(players.len());
    for (p, &bit) in players.iter().zip(record.outcomes()) {
        ledger.record(p.id, RandomnessKind::Measurement, bit as u64);
        let sent = match p.behavior {
            Behavior::Withhold => continue,
            Behavior::InvertOutcome => bit ^ 1,
            Behavior::Honest | Behavior::ExtraFlip => bit,
        };
        entries.push(Broadcast {
            player: p.id,
            bits: BitString::bit(sent),
        });
    }
    entries
}

fn run_round(players: &[PlayerConfig], rng: &mut RngStream) -> Result<AnonOutcome> {
    let n = players.len();
    let mut state = GhzPhaseState::new(n)?;
    for p in players.iter().filter(|p| p.flips()) {
        state = state.apply_phase_flip(p.id)?;
    }
    let mut ledger = RandomnessLedger::new();
    let entries = measure_and_broadcast(&state, players, rng, &mut ledger);
    let mut transcript = Transcript::new();
    transcript.push_round(entries, n);

    if transcript.aborted {
        return Ok(AnonOutcome {
            decoded: None,
            player_decoded: vec![None; n],
            transcript,
            ledger,
        });
    }
    // Reliable broadcast: every honest player sees the same bits.
    let decoded = parity(&transcript.round_bits(0));
    let player_decoded = players.iter().map(|p| p.honest().then_some(decoded)).collect();
    Ok(AnonOutcome {
        decoded: Some(decoded),
        player_decoded,
        transcript,
        ledger,
    })
}

/// Runs ANON with explicit player configurations (ids `0..n` in order,
/// exactly one sender).
pub fn anon_run(players: &[PlayerConfig], rng: &mut RngStream) -> Result<AnonOutcome> {
    let n = players.len();
    ensure!(n >= 3, "ANON needs at least 3 players, got {n}");
    for (i, p) in players.iter().enumerate() {
        ensure!(
            p.id == i,
            "player configs must be ordered by id (slot {i} holds {})",
            p.id
        );
    }
    let senders = players.iter().filter(|p| p.role == Role::Sender).count();
    ensure!(senders == 1, "ANON needs exactly one sender, got {senders}");
    run_round(players, rng)
}

/// Honest ANON: `sender` transmits bit `d` among `n` players.
pub fn anon_send(n: usize, sender: usize, d: u8, rng: &mut RngStream) -> Result<AnonOutcome> {
    ensure!(n >= 3, "ANON needs at least 3 players, got {n}");
    check_index(n, sender, "sender")?;
    let players: Vec<_> = (0..n)
        .map(|i| {
            if i == sender {
                PlayerConfig::sender(i, d)
            } else {
                PlayerConfig::bystander(i)
            }
        })
        .collect();
    run_round(&players, rng)
}

/// Parity mode: every player in `flippers` applies a phase flip.
pub fn anon_parity_run(n: usize, flippers: &[usize], rng: &mut RngStream) -> Result<AnonOutcome> {
    ensure!(n >= 3, "ANON needs at least 3 players, got {n}");
    let flippers = check_index_set(n, flippers, "flipper")?;
    let players: Vec<_> = (0..n)
        .map(|i| {
            if flippers.binary_search(&i).is_ok() {
                PlayerConfig::sender(i, 1)
            } else {
                PlayerConfig::bystander(i)
            }
        })
        .collect();
    run_round(&players, rng)
}

/// The decoded bit of a parity-mode run: `|flippers| mod 2`.
pub fn anon_multiparty_parity(n: usize, flippers: &[usize], rng: &mut RngStream) -> Result<u8> {
    let out = anon_parity_run(n, flippers, rng)?;
    Ok(out.decoded.expect("honest parity run cannot abort"))
}
