use std::collections::hash_map::Entry;
use std::collections::{BTreeMap, HashMap};

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::exact::{exact_view_distribution, Distribution, Prob, RunFamily};
use super::view::AdversaryView;
use crate::error::{ensure, Result};
use crate::keygraph::Subsets;
use crate::rng::RngStream;

pub const DEFAULT_TV_THRESHOLD: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Target {
    Sender,
    Receiver,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Exact,
    Sampled,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerdictOptions {
    pub mode: Mode,
    /// Runs per candidate in sampled mode.
    pub trials: usize,
    /// Allowed gap between the posterior and the baseline in exact mode.
    pub tolerance: f64,
    /// Largest total variation distance accepted in sampled mode.
    pub tv_threshold: f64,
    pub seed: u64,
}

impl Default for VerdictOptions {
    fn default() -> Self {
        Self {
            mode: Mode::Exact,
            trials: 10_000,
            tolerance: 1e-12,
            tv_threshold: DEFAULT_TV_THRESHOLD,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnonymityVerdict {
    pub protocol: String,
    pub n: usize,
    pub t: usize,
    pub target: Target,
    pub mode: Mode,
    /// Success probability of the Bayes-optimal guess of the target.
    pub posterior_max: f64,
    /// `1/(n − t)`.
    pub baseline: f64,
    pub verdict: bool,
    pub trials: usize,
    pub seed: Option<u64>,
    pub corrupted: Vec<usize>,
    pub hijacked_all: bool,
    /// Exact-mode posterior as a reduced fraction.
    pub posterior_exact: Option<String>,
    /// Sampled-mode largest pairwise TV distance between candidates' views.
    pub tv_distance: Option<f64>,
}

impl AnonymityVerdict {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("verdict serializes")
    }
}

/// Exact Bayes posteriors over the candidates for every possible view.
#[derive(Debug, Clone, PartialEq)]
pub struct PosteriorTable {
    pub candidates: Vec<usize>,
    /// View key → posterior per candidate (same order as `candidates`).
    pub rows: BTreeMap<String, Vec<Prob>>,
    /// `Σ_view max_c P(c, view)`.
    pub success: Prob,
}

/// Role assignments consistent with `candidate` holding `target`, each
/// equally likely.
fn role_pairs(family: &RunFamily, target: Target, candidate: usize) -> Vec<(usize, Option<usize>)> {
    let n = family.n();
    match (target, family.uses_receiver()) {
        (Target::Sender, true) => (0..n)
            .filter(|&r| r != candidate)
            .map(|r| (candidate, Some(r)))
            .collect(),
        (Target::Sender, false) => vec![(candidate, None)],
        (Target::Receiver, true) => (0..n)
            .filter(|&s| s != candidate)
            .map(|s| (s, Some(candidate)))
            .collect(),
        (Target::Receiver, false) => (0..n).filter(|&s| s != candidate).map(|s| (s, None)).collect(),
    }
}

fn candidates(n: usize, corrupted: &[usize]) -> Result<Vec<usize>> {
    ensure!(
        corrupted.len() + 2 <= n,
        "definitions allow at most n − 2 = {} corrupted players, got {}",
        n.saturating_sub(2),
        corrupted.len()
    );
    Ok((0..n).filter(|p| !corrupted.contains(p)).collect())
}

pub fn posterior_table(
    family: &RunFamily,
    target: Target,
    corrupted: &[usize],
    hijacked_all: bool,
) -> Result<PosteriorTable> {
    let cands = candidates(family.n(), corrupted)?;
    let prior = Prob::new(1, cands.len() as i128);
    let mut cache: HashMap<(usize, Option<usize>), Distribution> = HashMap::new();
    let mut joint: BTreeMap<String, Vec<Prob>> = BTreeMap::new();
    for (ci, &c) in cands.iter().enumerate() {
        let pairs = role_pairs(family, target, c);
        let weight = prior / Prob::from_integer(pairs.len() as i128);
        for pair in pairs {
            if let Entry::Vacant(slot) = cache.entry(pair) {
                slot.insert(exact_view_distribution(
                    family,
                    pair.0,
                    pair.1,
                    corrupted,
                    hijacked_all,
                )?);
            }
            for (view, p) in &cache[&pair] {
                let row = joint
                    .entry(view.clone())
                    .or_insert_with(|| vec![Prob::zero(); cands.len()]);
                row[ci] += weight * p;
            }
        }
    }
    let mut success = Prob::zero();
    let rows = joint
        .into_iter()
        .map(|(view, row)| {
            let total: Prob = row.iter().copied().sum();
            success += row.iter().copied().max().unwrap_or_else(Prob::zero);
            let post = row.into_iter().map(|p| p / total).collect();
            (view, post)
        })
        .collect();
    Ok(PosteriorTable {
        candidates: cands,
        rows,
        success,
    })
}

fn verdict_for(
    family: &RunFamily,
    target: Target,
    corrupted: &[usize],
    hijacked_all: bool,
    opts: &VerdictOptions,
) -> Result<AnonymityVerdict> {
    let n = family.n();
    let cands = candidates(n, corrupted)?;
    let t = corrupted.len();
    let baseline = 1.0 / cands.len() as f64;
    let mut out = AnonymityVerdict {
        protocol: family.name().to_owned(),
        n,
        t,
        target,
        mode: opts.mode,
        posterior_max: 0.0,
        baseline,
        verdict: false,
        trials: 0,
        seed: None,
        corrupted: {
            let mut c = corrupted.to_vec();
            c.sort_unstable();
            c
        },
        hijacked_all,
        posterior_exact: None,
        tv_distance: None,
    };
    match opts.mode {
        Mode::Exact => {
            let table = posterior_table(family, target, corrupted, hijacked_all)?;
            out.posterior_max = *table.success.numer() as f64 / *table.success.denom() as f64;
            out.posterior_exact = Some(table.success.to_string());
            out.verdict = (out.posterior_max - baseline).abs() <= opts.tolerance;
        }
        Mode::Sampled => {
            ensure!(opts.trials > 0, "sampled mode needs at least one trial");
            let (success, tv) = sampled_statistics(family, target, corrupted, hijacked_all, &cands, opts)?;
            out.posterior_max = success;
            out.tv_distance = Some(tv);
            out.trials = opts.trials;
            out.seed = Some(opts.seed);
            out.verdict = tv <= opts.tv_threshold;
        }
    }
    Ok(out)
}

fn sampled_statistics(
    family: &RunFamily,
    target: Target,
    corrupted: &[usize],
    hijacked_all: bool,
    cands: &[usize],
    opts: &VerdictOptions,
) -> Result<(f64, f64)> {
    let n = family.n();
    let mut histograms: Vec<HashMap<String, usize>> = Vec::with_capacity(cands.len());
    for (ci, &c) in cands.iter().enumerate() {
        let pairs = role_pairs(family, target, c);
        let mut hist = HashMap::new();
        for trial in 0..opts.trials {
            let mut rng = RngStream::derived(opts.seed, &[ci as u64, trial as u64]);
            let pair = pairs[rng.range_inclusive(0, pairs.len() as u64 - 1) as usize];
            let (transcript, ledger) = family.sample(pair.0, pair.1, &mut rng)?;
            let key = AdversaryView::redact(n, &transcript, &ledger, corrupted, hijacked_all)?.key();
            *hist.entry(key).or_insert(0) += 1;
        }
        histograms.push(hist);
    }
    let trials = opts.trials as f64;
    let mut views: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for (ci, hist) in histograms.iter().enumerate() {
        for (view, &count) in hist {
            views.entry(view).or_insert_with(|| vec![0; cands.len()])[ci] = count;
        }
    }
    let success = views
        .values()
        .map(|row| *row.iter().max().unwrap_or(&0) as f64)
        .sum::<f64>()
        / (trials * cands.len() as f64);
    let mut tv: f64 = 0.0;
    for a in 0..cands.len() {
        for b in a + 1..cands.len() {
            let d = views
                .values()
                .map(|row| (row[a] as f64 - row[b] as f64).abs() / trials)
                .sum::<f64>()
                / 2.0;
            tv = tv.max(d);
        }
    }
    Ok((success, tv))
}

/// Sender/receiver anonymity against the colluders in `corrupted`, who see
/// the transcript and their own randomness.
pub fn anonymity_verdict(
    family: &RunFamily,
    target: Target,
    corrupted: &[usize],
    opts: &VerdictOptions,
) -> Result<AnonymityVerdict> {
    verdict_for(family, target, corrupted, false, opts)
}

/// Tracelessness: as [`anonymity_verdict`] but every player's randomness is
/// seized after the run.
pub fn traceless_verdict(
    family: &RunFamily,
    target: Target,
    corrupted: &[usize],
    opts: &VerdictOptions,
) -> Result<AnonymityVerdict> {
    verdict_for(family, target, corrupted, true, opts)
}

/// The least favorable verdict over every corrupted set of size `t`.
pub fn worst_case_verdict(
    family: &RunFamily,
    target: Target,
    t: usize,
    hijacked_all: bool,
    opts: &VerdictOptions,
) -> Result<AnonymityVerdict> {
    let n = family.n();
    ensure!(t + 2 <= n, "t = {t} exceeds n − 2 = {}", n.saturating_sub(2));
    let mut worst: Option<AnonymityVerdict> = None;
    for set in Subsets::new(n, t) {
        let v = verdict_for(family, target, &set, hijacked_all, opts)?;
        let worse = match &worst {
            None => true,
            Some(w) => (v.posterior_max - v.baseline) > (w.posterior_max - w.baseline) || (w.verdict && !v.verdict),
        };
        if worse {
            worst = Some(v);
        }
    }
    Ok(worst.expect("at least one corrupted set"))
}
