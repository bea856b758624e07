use std::collections::BTreeMap;

use num_complex::Complex64;
use num_rational::Ratio;
use num_traits::{One, Zero};

use super::dcnet::{all_key_assignments, dcnet_round, DcNetInstance};
use super::view::AdversaryView;
use crate::error::{ensure, Error, Result};
use crate::keygraph::KeySharingGraph;
use crate::protocols::{
    ae_establish, anon_send, anonq_send, BitString, Broadcast, RandomnessKind, RandomnessLedger, Transcript,
};
use crate::qsim::GhzPhaseState;
use crate::rng::RngStream;

/// Exact probability.
pub type Prob = Ratio<i128>;

/// View key → probability.
pub type Distribution = BTreeMap<String, Prob>;

const ANON_EXACT_LIMIT: usize = 10;
const AE_EXACT_LIMIT: usize = 10;
const ANONQ_EXACT_LIMIT: usize = 5;
const DCNET_EDGE_LIMIT: usize = 20;

/// A family of runs whose only unknowns, from the adversary's side, are the
/// roles.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RunFamily {
    Anon { n: usize, d: u8 },
    Ae { n: usize },
    Anonq { n: usize },
    DcNet { graph: KeySharingGraph, d: u8 },
}

struct Branch {
    prob: Prob,
    transcript: Transcript,
    ledger: RandomnessLedger,
}

fn half() -> Prob {
    Prob::new(1, 2)
}

fn pow2(k: usize) -> i128 {
    1i128 << k
}

fn bits_of(value: usize, width: usize) -> Vec<u8> {
    (0..width).map(|i| ((value >> (width - 1 - i)) & 1) as u8).collect()
}

fn single_round(bits: &[u8]) -> Transcript {
    let mut t = Transcript::new();
    let entries = bits
        .iter()
        .enumerate()
        .map(|(player, &b)| Broadcast {
            player,
            bits: BitString::bit(b),
        })
        .collect();
    t.push_round(entries, bits.len());
    t
}

/// `(1 + (−1)^{|x|} cos φ)/2ⁿ` as a rational; needs `cos φ ∈ {−1, 0, 1}`.
fn exact_outcome_probability(state: &GhzPhaseState, outcome: &[u8]) -> Result<Prob> {
    let cos = state.cos_phase();
    ensure!(
        cos == 0.0 || cos == 1.0 || cos == -1.0,
        "exact enumeration needs a phase that is a multiple of π/2"
    );
    let sign: i128 = if crate::qsim::parity(outcome) == 0 { 1 } else { -1 };
    Ok(Prob::new(1 + sign * cos as i128, pow2(state.num_qubits())))
}

impl RunFamily {
    pub fn n(&self) -> usize {
        match self {
            RunFamily::Anon { n, .. } | RunFamily::Ae { n } | RunFamily::Anonq { n } => *n,
            RunFamily::DcNet { graph, .. } => graph.node_count(),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            RunFamily::Anon { .. } => "anon",
            RunFamily::Ae { .. } => "ae",
            RunFamily::Anonq { .. } => "anonq",
            RunFamily::DcNet { .. } => "dcnet",
        }
    }

    /// Whether runs have a designated receiver that shapes the transcript.
    pub fn uses_receiver(&self) -> bool {
        matches!(self, RunFamily::Ae { .. } | RunFamily::Anonq { .. })
    }

    fn check_roles(&self, sender: usize, receiver: Option<usize>) -> Result<()> {
        let n = self.n();
        ensure!(sender < n, "sender {sender} out of range for {n} players");
        if self.uses_receiver() {
            let r = receiver.ok_or_else(|| Error::invalid("this protocol needs a receiver"))?;
            ensure!(r < n, "receiver {r} out of range for {n} players");
            ensure!(r != sender, "sender and receiver must differ");
        }
        Ok(())
    }

    fn check_exact_size(&self) -> Result<()> {
        let (size, limit) = match self {
            RunFamily::Anon { n, .. } => (*n, ANON_EXACT_LIMIT),
            RunFamily::Ae { n } => (*n, AE_EXACT_LIMIT),
            RunFamily::Anonq { n } => (*n, ANONQ_EXACT_LIMIT),
            RunFamily::DcNet { graph, .. } => (graph.edge_count(), DCNET_EDGE_LIMIT),
        };
        if size > limit {
            return Err(Error::TooLarge(format!(
                "{} with size {size} exceeds the exact limit {limit}",
                self.name()
            )));
        }
        Ok(())
    }

    fn anon_branches(n: usize, sender: usize, d: u8) -> Result<Vec<Branch>> {
        let mut state = GhzPhaseState::new(n)?;
        if d == 1 {
            state = state.apply_phase_flip(sender)?;
        }
        let mut out = Vec::new();
        for x in 0..1usize << n {
            let bits = bits_of(x, n);
            let prob = exact_outcome_probability(&state, &bits)?;
            if prob.is_zero() {
                continue;
            }
            let mut ledger = RandomnessLedger::new();
            for (p, &b) in bits.iter().enumerate() {
                ledger.record(p, RandomnessKind::Measurement, b as u64);
            }
            out.push(Branch {
                prob,
                transcript: single_round(&bits),
                ledger,
            });
        }
        Ok(out)
    }

    fn ae_branches(n: usize, sender: usize, receiver: usize) -> Vec<Branch> {
        let others: Vec<usize> = (0..n).filter(|&i| i != sender && i != receiver).collect();
        // subset outcomes are uniform, b and b′ are fair coins
        let measured = Prob::new(1, pow2(others.len()));
        let mut out = Vec::new();
        for x in 0..1usize << others.len() {
            let ms = bits_of(x, others.len());
            for b in 0..2u8 {
                for decoy in 0..2u8 {
                    let mut bits = vec![0u8; n];
                    let mut ledger = RandomnessLedger::new();
                    for (&j, &m) in others.iter().zip(&ms) {
                        bits[j] = m;
                        ledger.record(j, RandomnessKind::Measurement, m as u64);
                    }
                    bits[sender] = b;
                    ledger.record(sender, RandomnessKind::Coin, b as u64);
                    bits[receiver] = decoy;
                    ledger.record(receiver, RandomnessKind::Decoy, decoy as u64);
                    out.push(Branch {
                        prob: measured * half() * half(),
                        transcript: single_round(&bits),
                        ledger,
                    });
                }
            }
        }
        out
    }

    fn anonq_branches(n: usize, sender: usize, receiver: usize) -> Result<Vec<Branch>> {
        let ae = Self::ae_branches(n, sender, receiver);
        let anon = [Self::anon_branches(n, sender, 0)?, Self::anon_branches(n, sender, 1)?];
        // Bell outcomes are uniform whatever the input qubit
        let bell = Prob::new(1, 4);
        let mut out = Vec::new();
        for a in &ae {
            for m0 in 0..2 {
                for m1 in 0..2 {
                    for first in &anon[m0] {
                        for second in &anon[m1] {
                            let mut transcript = a.transcript.clone();
                            transcript.extend(first.transcript.clone());
                            transcript.extend(second.transcript.clone());
                            let mut ledger = a.ledger.clone();
                            ledger.append(first.ledger.clone());
                            ledger.append(second.ledger.clone());
                            out.push(Branch {
                                prob: a.prob * bell * first.prob * second.prob,
                                transcript,
                                ledger,
                            });
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    fn dcnet_branches(graph: &KeySharingGraph, sender: usize, d: u8) -> Result<Vec<Branch>> {
        let prob = Prob::new(1, pow2(graph.edge_count()));
        all_key_assignments(graph)
            .map(|keys| {
                let inst = DcNetInstance::new(graph.clone(), keys, sender, d)?;
                let round = dcnet_round(&inst)?;
                Ok(Branch {
                    prob,
                    transcript: round.transcript(),
                    ledger: inst.ledger(),
                })
            })
            .collect()
    }

    fn branches(&self, sender: usize, receiver: Option<usize>) -> Result<Vec<Branch>> {
        self.check_roles(sender, receiver)?;
        self.check_exact_size()?;
        match self {
            RunFamily::Anon { n, d } => Self::anon_branches(*n, sender, *d),
            RunFamily::Ae { n } => Ok(Self::ae_branches(*n, sender, receiver.expect("checked"))),
            RunFamily::Anonq { n } => Self::anonq_branches(*n, sender, receiver.expect("checked")),
            RunFamily::DcNet { graph, d } => Self::dcnet_branches(graph, sender, *d),
        }
    }

    /// One simulated run with the given roles.
    pub fn sample(
        &self,
        sender: usize,
        receiver: Option<usize>,
        rng: &mut RngStream,
    ) -> Result<(Transcript, RandomnessLedger)> {
        self.check_roles(sender, receiver)?;
        match self {
            RunFamily::Anon { n, d } => {
                let out = anon_send(*n, sender, *d, rng)?;
                Ok((out.transcript, out.ledger))
            }
            RunFamily::Ae { n } => {
                let out = ae_establish(*n, sender, receiver.expect("checked"), rng)?;
                Ok((out.transcript, out.ledger))
            }
            RunFamily::Anonq { n } => {
                let theta = rng.unit() * std::f64::consts::PI;
                let phi = rng.unit() * 2.0 * std::f64::consts::PI;
                let input = (
                    Complex64::new((theta / 2.0).cos(), 0.0),
                    Complex64::from_polar((theta / 2.0).sin(), phi),
                );
                let out = anonq_send(*n, sender, receiver.expect("checked"), input, rng)?;
                Ok((out.transcript, out.ledger))
            }
            RunFamily::DcNet { graph, d } => {
                let inst = DcNetInstance::random(graph.clone(), sender, *d, rng)?;
                let round = dcnet_round(&inst)?;
                Ok((round.transcript(), inst.ledger()))
            }
        }
    }
}

/// Exact distribution of the adversary's view for fixed roles.
pub fn exact_view_distribution(
    family: &RunFamily,
    sender: usize,
    receiver: Option<usize>,
    corrupted: &[usize],
    hijacked_all: bool,
) -> Result<Distribution> {
    let n = family.n();
    let mut dist = Distribution::new();
    for branch in family.branches(sender, receiver)? {
        let key = AdversaryView::redact(n, &branch.transcript, &branch.ledger, corrupted, hijacked_all)?.key();
        *dist.entry(key).or_insert_with(Prob::zero) += branch.prob;
    }
    debug_assert_eq!(dist.values().copied().sum::<Prob>(), Prob::one());
    Ok(dist)
}

/// Exact joint distribution of the transcript `C` and every player's
/// randomness `G`, for fixed roles.
pub fn exact_transcript_distribution(
    family: &RunFamily,
    sender: usize,
    receiver: Option<usize>,
) -> Result<Distribution> {
    exact_view_distribution(family, sender, receiver, &[], true)
}
