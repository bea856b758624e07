//! Round-structured protocol runs over shared GHZ states.
//!
//! Every run is deterministic given its arguments and an [`RngStream`](crate::RngStream),
//! and returns the public [`Transcript`] together with the per-player
//! [`RandomnessLedger`] a post-run hijacker would seize.

mod ae;
mod aloha;
mod anon;
mod anonq;
mod collision;
mod election;
mod key_exchange;
mod players;
mod transcript;

pub use ae::{ae_establish, AeOutcome};
pub use aloha::{aloha_schedule, AlohaSchedule, DEFAULT_ALOHA_CAP};
pub use anon::{anon_multiparty_parity, anon_parity_run, anon_run, anon_send, AnonOutcome};
pub use anonq::{anonq_send, AnonqOutcome};
pub use collision::{
    ceil_log2, collision_detect, decompose_k, detection_rounds, prepare_rotated_states, CollisionRun, CollisionVerdict,
    Verdict,
};
pub use election::{elect_sender_receiver, Election};
pub use key_exchange::{anonymous_key_exchange, anonymous_key_exchange_with_bits, KeyExchange};
pub use players::{Behavior, DataItem, PlayerConfig, Role};
pub use transcript::{BitString, Broadcast, RandomnessKind, RandomnessLedger, RunRecord, Transcript};

use crate::error::{ensure, Result};

pub(crate) fn check_index(n: usize, index: usize, what: &str) -> Result<()> {
    ensure!(index < n, "{what} {index} out of range for {n} players");
    Ok(())
}

/// Validates an index set against `n` and returns it sorted and deduplicated-checked.
pub(crate) fn check_index_set(n: usize, set: &[usize], what: &str) -> Result<Vec<usize>> {
    let mut sorted = set.to_vec();
    sorted.sort_unstable();
    for w in sorted.windows(2) {
        ensure!(w[0] != w[1], "{what} {} listed twice", w[0]);
    }
    for &i in &sorted {
        check_index(n, i, what)?;
    }
    Ok(sorted)
}
