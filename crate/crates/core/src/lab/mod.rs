//! Adversary analysis.
//!
//! Views are built by redacting full run records ([`AdversaryView`]). Exact
//! mode enumerates every random branch of a run family with rational
//! probabilities and applies Bayes' rule with a uniform prior over the
//! non-corrupted candidates; sampled mode runs the simulators and compares
//! empirical view distributions by total variation distance.

mod dcnet;
mod exact;
mod verdict;
mod view;

pub use dcnet::{all_key_assignments, dcnet_round, trace_attack, trace_attack_anon, DcNetInstance, DcNetRound};
pub use exact::{exact_transcript_distribution, exact_view_distribution, Distribution, Prob, RunFamily};
pub use verdict::{
    anonymity_verdict, posterior_table, traceless_verdict, worst_case_verdict, AnonymityVerdict, Mode, PosteriorTable,
    Target, VerdictOptions, DEFAULT_TV_THRESHOLD,
};
pub use view::AdversaryView;
