use serde::{Deserialize, Serialize};

use super::anon::measure_and_broadcast;
use super::{check_index_set, PlayerConfig, RandomnessLedger, Transcript};
use crate::error::{ensure, Result};
use crate::qsim::{parity, GhzPhaseState};
use crate::rng::RngStream;

/// `⌈log₂ n⌉` for `n ≥ 1`.
pub fn ceil_log2(n: usize) -> u32 {
    assert!(n >= 1, "ceil_log2 of zero");
    usize::BITS - (n - 1).leading_zeros()
}

/// Number of detection rounds for `n` players: `⌈log₂ n⌉ + 1`.
pub fn detection_rounds(n: usize) -> usize {
    ceil_log2(n) as usize + 1
}

/// Unique `(j, m)` with `m` odd and `k = 2ʲ·m + 1`.
pub fn decompose_k(k: u64) -> Result<(u32, u64)> {
    ensure!(k >= 2, "decomposition needs k ≥ 2, got {k}");
    let j = (k - 1).trailing_zeros();
    Ok((j, (k - 1) >> j))
}

/// The states `|t_j⟩ = R_z(−π/2ʲ)|Ψ⟩` for `j = 0..=⌈log₂ n⌉`, all over the
/// common denominator `2^⌈log₂ n⌉`.
pub fn prepare_rotated_states(n: usize) -> Result<Vec<GhzPhaseState>> {
    ensure!(n >= 2, "collision detection needs at least 2 players, got {n}");
    let top = ceil_log2(n);
    (0..=top)
        .map(|j| GhzPhaseState::new(n)?.apply_rz(0, -1, j)?.rescaled(top))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    ExactlyOne,
    NotExactlyOne,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CollisionVerdict {
    /// `k_j mod 2` for every round that was run.
    pub parities: Vec<u8>,
    pub verdict: Verdict,
    pub first_odd_round: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct CollisionRun {
    pub verdict: CollisionVerdict,
    pub transcript: Transcript,
    pub ledger: RandomnessLedger,
}

/// Collision detection among `n` players, `wishers` being those who want to send.
///
/// In round `j` each wisher applies `R_z(π/2ʲ)` to `|t_j⟩`, then everyone
/// Hadamard-measures and broadcasts. The run stops at the first round with
/// odd weight.
pub fn collision_detect(n: usize, wishers: &[usize], rng: &mut RngStream) -> Result<CollisionRun> {
    let wishers = check_index_set(n, wishers, "wisher")?;
    let states = prepare_rotated_states(n)?;
    let players: Vec<_> = (0..n).map(PlayerConfig::bystander).collect();

    let mut transcript = Transcript::new();
    let mut ledger = RandomnessLedger::new();
    let mut parities = Vec::with_capacity(states.len());
    let mut first_odd_round = None;
    for (j, t_j) in states.iter().enumerate() {
        let mut state = *t_j;
        for &w in &wishers {
            state = state.apply_rz(w, 1, j as u32)?;
        }
        let entries = measure_and_broadcast(&state, &players, rng, &mut ledger);
        transcript.push_round(entries, n);
        let k_parity = parity(&transcript.round_bits(j));
        parities.push(k_parity);
        if k_parity == 1 {
            first_odd_round = Some(j);
            break;
        }
    }
    let verdict = if first_odd_round.is_none() {
        Verdict::ExactlyOne
    } else {
        Verdict::NotExactlyOne
    };
    Ok(CollisionRun {
        verdict: CollisionVerdict {
            parities,
            verdict,
            first_odd_round,
        },
        transcript,
        ledger,
    })
}
