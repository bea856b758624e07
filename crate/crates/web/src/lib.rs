//! Browser demo bindings. Each export takes plain numbers or text and returns
//! a JSON string; the page in `www/` renders it.

use ghz_anon::keygraph::{
    is_partitioning_set, key_lower_bound, min_degree, tolerance, KeySharingGraph, Subsets, SUBSET_ENUMERATION_LIMIT,
};
use ghz_anon::lab::{exact_transcript_distribution, RunFamily};
use ghz_anon::protocols::{anon_send, collision_detect, decompose_k, Verdict};
use ghz_anon::qsim::GhzPhaseState;
use ghz_anon::RngStream;
use serde::Serialize;
use wasm_bindgen::prelude::*;

/// Largest `n` the page will enumerate outcomes for.
pub const MAX_DEMO_PLAYERS: usize = 10;

#[derive(Serialize)]
struct Outcome {
    bits: String,
    p: f64,
}

#[derive(Serialize)]
struct AnonDemo {
    n: usize,
    sender: usize,
    d: u8,
    phase: String,
    prob_odd: f64,
    distribution: Vec<Outcome>,
    /// The exact transcript law is the same for every sender position.
    sender_invariant: bool,
    broadcast: String,
    decoded: Option<u8>,
}

#[derive(Serialize)]
struct RoundView {
    round: usize,
    bits: String,
    parity: u8,
}

#[derive(Serialize)]
struct CollisionDemo {
    n: usize,
    k: usize,
    wishers: Vec<usize>,
    rounds: Vec<RoundView>,
    verdict: &'static str,
    first_odd_round: Option<usize>,
    predicted_round: Option<usize>,
    max_rounds: usize,
}

#[derive(Serialize)]
struct GraphAudit {
    n: usize,
    edges: Vec<(usize, usize)>,
    connected: bool,
    min_degree: usize,
    requirement_met: bool,
    tolerance: i64,
    /// A smallest colluder set that splits the honest players, if one exists.
    witness: Option<Vec<usize>>,
    keys_needed_t0: Option<usize>,
    keys_needed_full: Option<usize>,
}

fn to_json<T: Serialize>(v: &T) -> String {
    serde_json::to_string(v).expect("demo output serializes")
}

fn bit_string(bits: &[u8]) -> String {
    bits.iter().map(|b| char::from(b'0' + b)).collect()
}

/// Exact outcome distribution of ANON with `sender` sending `d`, plus one
/// seeded run.
pub fn anon_demo_json(n: usize, sender: usize, d: u8, seed: u64) -> Result<String, String> {
    if !(3..=MAX_DEMO_PLAYERS).contains(&n) {
        return Err(format!("n must be between 3 and {MAX_DEMO_PLAYERS}"));
    }
    let err = |e: ghz_anon::Error| e.to_string();
    let mut state = GhzPhaseState::new(n).map_err(err)?;
    if d & 1 == 1 {
        state = state.apply_phase_flip(sender).map_err(err)?;
    }
    let distribution = (0..1usize << n)
        .map(|x| {
            let bits: Vec<u8> = (0..n).map(|q| ((x >> (n - 1 - q)) & 1) as u8).collect();
            let p = state.outcome_probability(&bits).map_err(err)?;
            Ok(Outcome {
                bits: bit_string(&bits),
                p,
            })
        })
        .collect::<Result<Vec<_>, String>>()?;
    let family = RunFamily::Anon { n, d: d & 1 };
    let reference = exact_transcript_distribution(&family, 0, None).map_err(err)?;
    let mut sender_invariant = true;
    for s in 1..n {
        sender_invariant &= exact_transcript_distribution(&family, s, None).map_err(err)? == reference;
    }
    let run = anon_send(n, sender, d & 1, &mut RngStream::new(seed, 0)).map_err(err)?;
    Ok(to_json(&AnonDemo {
        n,
        sender,
        d: d & 1,
        phase: if d & 1 == 1 { "π".into() } else { "0".into() },
        prob_odd: state.prob_odd_parity(),
        distribution,
        sender_invariant,
        broadcast: bit_string(&run.transcript.round_bits(0)),
        decoded: run.decoded,
    }))
}

/// Collision detection with `k` randomly chosen wishers among `n`.
pub fn collision_demo_json(n: usize, k: usize, seed: u64) -> Result<String, String> {
    if !(2..=64).contains(&n) || k > n {
        return Err("need 2 ≤ n ≤ 64 and k ≤ n".into());
    }
    let mut rng = RngStream::new(seed, 0);
    let mut pool: Vec<usize> = (0..n).collect();
    let mut wishers: Vec<usize> = (0..k)
        .map(|_| pool.swap_remove(rng.range_inclusive(0, pool.len() as u64 - 1) as usize))
        .collect();
    wishers.sort_unstable();
    let run = collision_detect(n, &wishers, &mut rng).map_err(|e| e.to_string())?;
    let rounds = (0..run.transcript.rounds.len())
        .map(|j| RoundView {
            round: j,
            bits: bit_string(&run.transcript.round_bits(j)),
            parity: run.verdict.parities[j],
        })
        .collect();
    let predicted_round = match k {
        0 => Some(0),
        1 => None,
        _ => decompose_k(k as u64).ok().map(|(j, _)| j as usize),
    };
    Ok(to_json(&CollisionDemo {
        n,
        k,
        wishers,
        rounds,
        verdict: match run.verdict.verdict {
            Verdict::ExactlyOne => "exactly one",
            Verdict::NotExactlyOne => "not exactly one",
        },
        first_odd_round: run.verdict.first_odd_round,
        predicted_round,
        max_rounds: ghz_anon::protocols::detection_rounds(n),
    }))
}

/// Audit of a key-sharing graph given as edge-list text or adjacency JSON.
pub fn keygraph_audit_json(text: &str) -> Result<String, String> {
    let g = if text.trim_start().starts_with('{') {
        KeySharingGraph::from_adjacency_json(text)
    } else {
        KeySharingGraph::from_edge_list(text)
    }
    .map_err(|e| e.to_string())?;
    let n = g.node_count();
    if n > 32 {
        return Err("the demo draws at most 32 nodes".into());
    }
    let t = tolerance(&g);
    let deg = min_degree(&g);
    let witness = if !g.is_connected() {
        Some(Vec::new())
    } else if n <= SUBSET_ENUMERATION_LIMIT && t + 3 <= n as i64 {
        Subsets::new(n, (t + 1) as usize).find(|s| is_partitioning_set(&g, s).unwrap_or(false))
    } else {
        None
    };
    let bound = |t: usize| key_lower_bound(n, t).ok().map(|b| b.keys);
    Ok(to_json(&GraphAudit {
        n,
        edges: g.edges().collect(),
        connected: g.is_connected(),
        min_degree: deg.min_degree,
        requirement_met: deg.requirement_met,
        tolerance: t,
        witness,
        keys_needed_t0: bound(0),
        keys_needed_full: n.checked_sub(2).and_then(bound),
    }))
}

fn js(r: Result<String, String>) -> Result<String, JsValue> {
    r.map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn anon_demo(n: usize, sender: usize, d: u8, seed: u64) -> Result<String, JsValue> {
    js(anon_demo_json(n, sender, d, seed))
}

#[wasm_bindgen]
pub fn collision_demo(n: usize, k: usize, seed: u64) -> Result<String, JsValue> {
    js(collision_demo_json(n, k, seed))
}

#[wasm_bindgen]
pub fn keygraph_audit(text: &str) -> Result<String, JsValue> {
    js(keygraph_audit_json(text))
}
