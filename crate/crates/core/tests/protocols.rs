mod common;

use std::collections::{BTreeMap, BTreeSet};

use common::{ae_replay_fidelity, random_qubit};
use ghz_anon::lab::{exact_transcript_distribution, RunFamily};
use ghz_anon::protocols::{
    ae_establish, aloha_schedule, anon_run, anon_send, anonq_send, anonymous_key_exchange,
    anonymous_key_exchange_with_bits, elect_sender_receiver, Behavior, PlayerConfig, RandomnessKind,
};
use ghz_anon::RngStream;
use num_complex::Complex64;

#[test]
fn ae_matches_state_vector_replay() {
    for n in 3..=7 {
        for s in 0..n {
            for r in (0..n).filter(|&r| r != s) {
                for seed in 0..20 {
                    let out = ae_establish(n, s, r, &mut RngStream::new(seed, (n * 100 + s * 10 + r) as u64)).unwrap();
                    assert_eq!(out.epr.phase_numerator(), 0);
                    let bits = out.transcript.round_bits(0);
                    let f = ae_replay_fidelity(n, s, r, &bits);
                    assert!((f - 1.0).abs() <= 1e-12, "n={n} s={s} r={r} seed={seed} fidelity {f}");
                }
            }
        }
    }
}

#[test]
fn ae_ledger_labels() {
    let out = ae_establish(5, 1, 3, &mut RngStream::new(2, 0)).unwrap();
    assert_eq!(out.ledger.kinds_of(1), &[RandomnessKind::Coin]);
    assert_eq!(out.ledger.kinds_of(3), &[RandomnessKind::Decoy]);
    assert_eq!(out.ledger.kinds_of(0), &[RandomnessKind::Measurement]);
    assert_eq!(out.transcript.rounds.len(), 1);
    assert_eq!(out.transcript.rounds[0].len(), 5);
}

/// Each Bell-outcome branch is reached by drawing fresh seeds until it shows up.
#[test]
fn anonq_every_correction_branch() {
    let mut input_rng = RngStream::new(77, 0);
    for n in [3, 4, 6] {
        let mut seen = BTreeSet::new();
        let mut seed = 0;
        while seen.len() < 4 {
            assert!(seed < 500, "branches {seen:?} after {seed} draws");
            let input = random_qubit(&mut input_rng);
            let out = anonq_send(n, 0, n - 1, input, &mut RngStream::new(seed, n as u64)).unwrap();
            assert!(out.fidelity >= 1.0 - 1e-12, "fidelity {}", out.fidelity);
            seen.insert(out.bell_outcomes);
            seed += 1;
        }
    }
}

#[test]
fn anonq_transcript_and_ledger_shape() {
    let input = (Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8));
    let out = anonq_send(4, 2, 0, input, &mut RngStream::new(5, 0)).unwrap();
    assert_eq!(out.transcript.rounds.len(), 3);
    // one AE value plus two ANON measurements per player, no Bell outcomes
    for p in 0..4 {
        assert_eq!(out.ledger.of(p).len(), 3);
    }
    assert!(anonq_send(
        4,
        2,
        0,
        (Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)),
        &mut RngStream::new(0, 0)
    )
    .is_err());
}

/// Sampled ANON transcripts all have parity `d` and spread uniformly over
/// that parity class, each count within three standard deviations.
#[test]
fn anon_transcripts_uniform_over_parity_class() {
    let n = 5;
    let samples = 100_000;
    for d in 0..2u8 {
        let mut rng = RngStream::new(2024, d as u64);
        let mut counts: BTreeMap<Vec<u8>, usize> = BTreeMap::new();
        for i in 0..samples {
            let out = anon_send(n, i % n, d, &mut rng).unwrap();
            let bits = out.transcript.round_bits(0);
            assert_eq!(bits.iter().fold(0, |a, b| a ^ b), d);
            *counts.entry(bits).or_insert(0) += 1;
        }
        assert_eq!(counts.len(), 1 << (n - 1));
        let p = 1.0 / (1 << (n - 1)) as f64;
        let mean = samples as f64 * p;
        let sigma = (samples as f64 * p * (1.0 - p)).sqrt();
        for (bits, &c) in &counts {
            assert!(
                (c as f64 - mean).abs() <= 3.0 * sigma,
                "{bits:?}: {c} vs {mean}±{sigma}"
            );
        }
    }
}

/// A cheater flipping on top of the honest sender inverts the decoded bit,
/// and the resulting transcripts still do not depend on who the sender is.
#[test]
fn extra_flip_disrupts_but_does_not_reveal() {
    let n = 5;
    for sender in 0..n {
        for d in 0..2u8 {
            for seed in 0..50 {
                let cheater = (sender + 2) % n;
                let players: Vec<_> = (0..n)
                    .map(|i| match i {
                        i if i == sender => PlayerConfig::sender(i, d),
                        i if i == cheater => PlayerConfig::bystander(i).with_behavior(Behavior::ExtraFlip),
                        i => PlayerConfig::bystander(i),
                    })
                    .collect();
                let out = anon_run(&players, &mut RngStream::new(seed, 0)).unwrap();
                assert_eq!(out.decoded, Some(d ^ 1));
            }
        }
    }
    for d in 0..2u8 {
        let flipped = RunFamily::Anon { n, d: d ^ 1 };
        let reference = exact_transcript_distribution(&flipped, 0, None).unwrap();
        for sender in 1..n {
            assert_eq!(
                exact_transcript_distribution(&flipped, sender, None).unwrap(),
                reference
            );
        }
    }
}

#[test]
fn withholding_aborts() {
    let players: Vec<_> = (0..4)
        .map(|i| match i {
            0 => PlayerConfig::sender(0, 1),
            2 => PlayerConfig::bystander(2).with_behavior(Behavior::Withhold),
            i => PlayerConfig::bystander(i),
        })
        .collect();
    let out = anon_run(&players, &mut RngStream::new(0, 0)).unwrap();
    assert!(out.transcript.aborted);
    assert_eq!(out.decoded, None);
}

#[test]
fn key_exchange_agrees() {
    for seed in 0..30 {
        let out = anonymous_key_exchange(5, 1, 3, 16, &mut RngStream::new(seed, 0)).unwrap();
        assert_eq!(out.key_i, out.key_j);
        assert_eq!(out.key_i.len(), out.kept.len());
    }
    let out =
        anonymous_key_exchange_with_bits(4, 0, 2, &[0, 1, 1, 0], &[0, 0, 1, 1], &mut RngStream::new(1, 0)).unwrap();
    assert_eq!(out.kept, vec![1, 3]);
    assert_eq!(out.key_i, vec![1, 0]);
    assert_eq!(out.key_j, vec![1, 0]);
}

/// Kept announcements are `(0,1)` or `(1,0)` with equal frequency whoever
/// holds which bit, so the public record does not reveal the key.
#[test]
fn key_exchange_announcements_hide_the_key() {
    let mut ones_first = [0usize; 2];
    let mut totals = [0usize; 2];
    for seed in 0..400 {
        let out = anonymous_key_exchange(4, 0, 1, 4, &mut RngStream::new(seed, 9)).unwrap();
        for (&idx, &bit) in out.kept.iter().zip(&out.key_i) {
            let (a, _) = out.announcements[idx];
            totals[bit as usize] += 1;
            ones_first[bit as usize] += a as usize;
        }
    }
    for b in 0..2 {
        let frac = ones_first[b] as f64 / totals[b] as f64;
        assert!((frac - 0.5).abs() < 0.1, "key bit {b}: first slot is 1 in {frac}");
    }
}

#[test]
fn aloha_serves_everyone() {
    for seed in 0..20 {
        let wishers = [0, 2, 3, 5, 6];
        let sched = aloha_schedule(8, &wishers, 4, 1000, &mut RngStream::new(seed, 0)).unwrap();
        assert!(sched.completed);
        let served: BTreeSet<usize> = sched.transmissions.iter().map(|&(_, p)| p).collect();
        assert_eq!(served, wishers.into_iter().collect());
        // at most one transmission per round
        let rounds: BTreeSet<usize> = sched.transmissions.iter().map(|&(r, _)| r).collect();
        assert_eq!(rounds.len(), sched.transmissions.len());
    }
    let capped = aloha_schedule(8, &[0, 1, 2, 3, 4, 5, 6, 7], 1, 5, &mut RngStream::new(0, 0)).unwrap();
    assert!(!capped.completed);
}

#[test]
fn election_outcomes() {
    let mut rng = RngStream::new(4, 0);
    assert_eq!(
        elect_sender_receiver(6, &[2], &[4], &mut rng).unwrap().pair,
        Some((2, 4))
    );
    assert_eq!(elect_sender_receiver(6, &[2], &[2], &mut rng).unwrap().pair, None);
    assert_eq!(elect_sender_receiver(6, &[1, 2], &[4], &mut rng).unwrap().pair, None);
    assert_eq!(elect_sender_receiver(6, &[], &[4], &mut rng).unwrap().pair, None);
}

#[test]
fn anon_bad_inputs() {
    let mut rng = RngStream::new(0, 0);
    assert!(anon_send(2, 0, 1, &mut rng).is_err());
    assert!(anon_send(4, 4, 1, &mut rng).is_err());
    assert!(ae_establish(4, 1, 1, &mut rng).is_err());
}
