use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{ensure, Result};
use crate::protocols::{RandomnessLedger, Transcript};

/// What the adversary holds after a run: the public transcript plus the
/// randomness of corrupted players, or of everyone when all players are
/// hijacked afterwards.
///
/// Built only by [`AdversaryView::redact`], so data items, roles and ledger
/// labels never reach it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdversaryView {
    pub corrupted: Vec<usize>,
    pub hijacked_all: bool,
    pub transcript: Transcript,
    pub randomness: BTreeMap<usize, Vec<u64>>,
}

impl AdversaryView {
    pub fn redact(
        n: usize,
        transcript: &Transcript,
        ledger: &RandomnessLedger,
        corrupted: &[usize],
        hijacked_all: bool,
    ) -> Result<Self> {
        ensure!(
            corrupted.len() + 2 <= n,
            "at most n − 2 = {} players can be corrupted, got {}",
            n.saturating_sub(2),
            corrupted.len()
        );
        let mut corrupted = corrupted.to_vec();
        corrupted.sort_unstable();
        for w in corrupted.windows(2) {
            ensure!(w[0] != w[1], "player {} corrupted twice", w[0]);
        }
        ensure!(
            corrupted.iter().all(|&c| c < n),
            "corrupted player out of range for {n} players"
        );
        let visible: Vec<usize> = if hijacked_all {
            (0..n).collect()
        } else {
            corrupted.clone()
        };
        let randomness = visible.iter().map(|&p| (p, ledger.of(p).to_vec())).collect();
        Ok(Self {
            corrupted,
            hijacked_all,
            transcript: transcript.clone(),
            randomness,
        })
    }

    /// Canonical text form, used as the outcome label in view distributions.
    pub fn key(&self) -> String {
        let mut key = String::from("C=");
        for (j, round) in self.transcript.rounds.iter().enumerate() {
            if j > 0 {
                key.push('/');
            }
            for b in round {
                write!(key, "{}:{}", b.player, b.bits).expect("write to string");
                key.push(',');
            }
        }
        if self.transcript.aborted {
            key.push_str(";aborted");
        }
        for (p, values) in &self.randomness {
            write!(key, ";G{p}=").expect("write to string");
            for v in values {
                write!(key, "{v}.").expect("write to string");
            }
        }
        key
    }
}
