use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A string of bits, serialized as `0`/`1` text.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitString(Vec<u8>);

impl BitString {
    pub fn new(bits: Vec<u8>) -> Self {
        debug_assert!(bits.iter().all(|b| *b <= 1));
        Self(bits)
    }

    pub fn bit(b: u8) -> Self {
        Self(vec![b & 1])
    }

    pub fn bits(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.0 {
            f.write_str(if *b == 1 { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl std::str::FromStr for BitString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|ch| match ch {
                '0' => Ok(0),
                '1' => Ok(1),
                other => Err(Error::Format(format!("invalid bit character {other:?}"))),
            })
            .collect::<Result<Vec<u8>>>()
            .map(Self)
    }
}

impl Serialize for BitString {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for BitString {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// One broadcast message `c_jm`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Broadcast {
    pub player: usize,
    pub bits: BitString,
}

/// The public record `C = {c_jm}` of a run.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Transcript {
    pub rounds: Vec<Vec<Broadcast>>,
    pub aborted: bool,
}

impl Transcript {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends a round. `expected` players should have broadcast; the run is
    /// marked aborted when any of them is missing.
    pub fn push_round(&mut self, entries: Vec<Broadcast>, expected: usize) {
        if entries.len() < expected {
            self.aborted = true;
        }
        self.rounds.push(entries);
    }

    pub fn extend(&mut self, other: Transcript) {
        self.aborted |= other.aborted;
        self.rounds.extend(other.rounds);
    }

    /// Concatenated bits of round `j` in broadcast order.
    pub fn round_bits(&self, j: usize) -> Vec<u8> {
        self.rounds
            .get(j)
            .map(|r| r.iter().flat_map(|b| b.bits.bits().iter().copied()).collect())
            .unwrap_or_default()
    }

    /// Messages sent by `player` across all rounds, in order.
    pub fn messages_of(&self, player: usize) -> Vec<&BitString> {
        self.rounds
            .iter()
            .flat_map(|r| r.iter().filter(|b| b.player == player).map(|b| &b.bits))
            .collect()
    }

    /// All bits of the transcript, round by round.
    pub fn flat_bits(&self) -> Vec<u8> {
        (0..self.rounds.len()).flat_map(|j| self.round_bits(j)).collect()
    }
}

/// What a ledger value was drawn for. Kept in memory for analysis only: it is
/// never serialized and adversary views drop it.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub enum RandomnessKind {
    #[default]
    Unlabeled,
    Measurement,
    Coin,
    Decoy,
    Backoff,
    SlotChoice,
    KeyBit,
}

/// Per-player randomness `G_m = {g_jm}`. Append-only.
///
/// Holds only random draws; data items and roles never enter the ledger.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "BTreeMap<usize, Vec<u64>>", into = "BTreeMap<usize, Vec<u64>>")]
pub struct RandomnessLedger {
    values: BTreeMap<usize, Vec<u64>>,
    kinds: BTreeMap<usize, Vec<RandomnessKind>>,
}

impl From<BTreeMap<usize, Vec<u64>>> for RandomnessLedger {
    fn from(values: BTreeMap<usize, Vec<u64>>) -> Self {
        let kinds = values
            .iter()
            .map(|(p, v)| (*p, vec![RandomnessKind::Unlabeled; v.len()]))
            .collect();
        Self { values, kinds }
    }
}

impl From<RandomnessLedger> for BTreeMap<usize, Vec<u64>> {
    fn from(ledger: RandomnessLedger) -> Self {
        ledger.values
    }
}

impl RandomnessLedger {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn record(&mut self, player: usize, kind: RandomnessKind, value: u64) {
        self.values.entry(player).or_default().push(value);
        self.kinds.entry(player).or_default().push(kind);
    }

    /// `G_m` for one player.
    pub fn of(&self, player: usize) -> &[u64] {
        self.values.get(&player).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn kinds_of(&self, player: usize) -> &[RandomnessKind] {
        self.kinds.get(&player).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn players(&self) -> impl Iterator<Item = usize> + '_ {
        self.values.keys().copied()
    }

    pub fn append(&mut self, other: RandomnessLedger) {
        for (p, vals) in other.values {
            let kinds = other.kinds.get(&p).cloned().unwrap_or_default();
            self.values.entry(p).or_default().extend(vals);
            self.kinds.entry(p).or_default().extend(kinds);
        }
    }
}

/// Serializable record of one run: transcript, ledger and public verdicts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub protocol: String,
    pub n: usize,
    pub aborted: bool,
    pub rounds: Vec<Vec<Broadcast>>,
    pub ledger: RandomnessLedger,
    pub verdicts: BTreeMap<String, serde_json::Value>,
}

impl RunRecord {
    pub fn new(protocol: &str, n: usize, transcript: Transcript, ledger: RandomnessLedger) -> Self {
        Self {
            protocol: protocol.to_owned(),
            n,
            aborted: transcript.aborted,
            rounds: transcript.rounds,
            ledger,
            verdicts: BTreeMap::new(),
        }
    }

    pub fn with_verdict(mut self, key: &str, value: impl Into<serde_json::Value>) -> Self {
        self.verdicts.insert(key.to_owned(), value.into());
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("run record serializes")
    }
}
