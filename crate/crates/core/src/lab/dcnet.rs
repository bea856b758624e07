use std::collections::BTreeMap;

use crate::error::{ensure, Result};
use crate::keygraph::KeySharingGraph;
use crate::protocols::{BitString, Broadcast, RandomnessKind, RandomnessLedger, Transcript};
use crate::rng::RngStream;

/// One round of a classical DC-net over a key-sharing graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DcNetInstance {
    pub graph: KeySharingGraph,
    /// One key bit per edge `(a, b)`, `a < b`.
    pub keys: BTreeMap<(usize, usize), u8>,
    pub sender: usize,
    pub d: u8,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DcNetRound {
    pub announcements: Vec<u8>,
    pub decoded: u8,
}

impl DcNetInstance {
    pub fn new(graph: KeySharingGraph, keys: BTreeMap<(usize, usize), u8>, sender: usize, d: u8) -> Result<Self> {
        ensure!(sender < graph.node_count(), "sender {sender} out of range");
        ensure!(
            keys.len() == graph.edge_count() && graph.edges().all(|e| keys.contains_key(&e)),
            "keys must cover exactly the graph's edges"
        );
        Ok(Self {
            graph,
            keys,
            sender,
            d: d & 1,
        })
    }

    /// Instance with uniformly random keys.
    pub fn random(graph: KeySharingGraph, sender: usize, d: u8, rng: &mut RngStream) -> Result<Self> {
        let keys = graph.edges().map(|e| (e, rng.bit())).collect();
        Self::new(graph, keys, sender, d)
    }

    /// XOR of the keys incident to `player`.
    pub fn key_parity(&self, player: usize) -> u8 {
        incident_parity(&self.graph, &self.keys, player)
    }

    /// The ledger a hijacker seizes: each player's incident key bits in edge order.
    pub fn ledger(&self) -> RandomnessLedger {
        let mut ledger = RandomnessLedger::new();
        for ((a, b), &k) in &self.keys {
            ledger.record(*a, RandomnessKind::KeyBit, k as u64);
            ledger.record(*b, RandomnessKind::KeyBit, k as u64);
        }
        ledger
    }
}

fn incident_parity(graph: &KeySharingGraph, keys: &BTreeMap<(usize, usize), u8>, player: usize) -> u8 {
    graph
        .edges()
        .filter(|(a, b)| *a == player || *b == player)
        .fold(0, |acc, e| acc ^ keys[&e])
}

/// Everyone announces the XOR of their keys, the sender additionally XORs in
/// `d`. Every key appears in exactly two announcements, so the XOR of all of
/// them is `d`.
pub fn dcnet_round(instance: &DcNetInstance) -> Result<DcNetRound> {
    ensure!(
        instance.graph.is_connected(),
        "DC-net needs a connected key-sharing graph"
    );
    let announcements: Vec<u8> = (0..instance.graph.node_count())
        .map(|m| instance.key_parity(m) ^ if m == instance.sender { instance.d } else { 0 })
        .collect();
    let decoded = announcements.iter().fold(0, |acc, a| acc ^ a);
    Ok(DcNetRound { announcements, decoded })
}

impl DcNetRound {
    pub fn transcript(&self) -> Transcript {
        let mut t = Transcript::new();
        let entries = self
            .announcements
            .iter()
            .enumerate()
            .map(|(player, &a)| Broadcast {
                player,
                bits: BitString::bit(a),
            })
            .collect();
        t.push_round(entries, self.announcements.len());
        t
    }
}

/// Trace-back by an adversary holding every key and knowing `d`.
///
/// For each player, the message it would have sent as a bystander (`f¹`) and
/// as the sender of `d` (`f²`) is recomputed from the keys. A player whose
/// observed message matches `f²` but not `f¹` is the sender. When `f¹ = f²`
/// for everyone (`d = 0`) nobody can be singled out.
pub fn trace_attack(
    graph: &KeySharingGraph,
    announcements: &[u8],
    keys: &BTreeMap<(usize, usize), u8>,
    d_known: u8,
) -> Option<usize> {
    (0..graph.node_count()).find(|&m| {
        let as_bystander = incident_parity(graph, keys, m);
        let as_sender = as_bystander ^ (d_known & 1);
        announcements.get(m) == Some(&as_sender) && as_sender != as_bystander
    })
}

/// The same simulation attack against an ANON run.
///
/// A player's broadcast is its measurement outcome whether or not it flipped
/// the phase, so both simulations reproduce the observed message and the
/// matcher never singles anyone out.
pub fn trace_attack_anon(transcript: &Transcript, ledger: &RandomnessLedger, _d_known: u8) -> Option<usize> {
    let round = transcript.rounds.first()?;
    round.iter().find_map(|b| {
        let outcome = *ledger.of(b.player).first()? as u8;
        let as_bystander = outcome;
        let as_sender = outcome;
        (b.bits.bits() == [as_sender] && as_sender != as_bystander).then_some(b.player)
    })
}

/// Every key assignment of `graph`, `2^|E|` in total.
pub fn all_key_assignments(graph: &KeySharingGraph) -> impl Iterator<Item = BTreeMap<(usize, usize), u8>> + '_ {
    let edges: Vec<(usize, usize)> = graph.edges().collect();
    assert!(edges.len() < 32, "too many edges to enumerate key assignments");
    (0u32..1 << edges.len()).map(move |mask| {
        edges
            .iter()
            .enumerate()
            .map(|(i, e)| (*e, ((mask >> i) & 1) as u8))
            .collect()
    })
}
