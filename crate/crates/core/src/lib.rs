//! Anonymous transmission over shared GHZ states.
//!
//! The crate is split into four layers:
//!
//! * [`qsim`] - exact simulation of the GHZ phase manifold plus a small dense
//!   state-vector backend used as an oracle and for teleportation.
//! * [`protocols`] - round-structured protocol runs (anonymous bit, anonymous
//!   entanglement, anonymous qubit, collision detection, ALOHA backoff,
//!   sender/receiver election, anonymous key exchange) that produce public
//!   transcripts and per-player randomness ledgers.
//! * [`lab`] - adversary analysis: exact and sampled view distributions,
//!   Bayes posteriors, tracelessness verdicts and the trace-back attack
//!   against a classical DC-net.
//! * [`keygraph`] - key-sharing graph audits (partitions, degree, collusion
//!   tolerance, key-count lower bounds).

pub mod error;
pub mod keygraph;
pub mod lab;
pub mod protocols;
pub mod qsim;
pub mod rng;

pub use error::{Error, Result};
pub use rng::RngStream;
