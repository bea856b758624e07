use super::{check_index_set, collision_detect, RandomnessKind, RandomnessLedger, Transcript, Verdict};
use crate::error::{ensure, Result};
use crate::rng::RngStream;

pub const DEFAULT_ALOHA_CAP: usize = 1000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlohaSchedule {
    /// Players attempting in each round, rounds numbered from 1.
    pub attempts: Vec<Vec<usize>>,
    /// `(round, player)` for every successful sole-sender round.
    pub transmissions: Vec<(usize, usize)>,
    /// False when the round cap was hit with wishers still pending.
    pub completed: bool,
    pub transcript: Transcript,
    pub ledger: RandomnessLedger,
}

impl AlohaSchedule {
    pub fn rounds(&self) -> usize {
        self.attempts.len()
    }
}

/// Slotted ALOHA with collision detection.
///
/// Every pending wisher attempts in round 1. Each round with attempts runs
/// collision detection; a sole attempter transmits and leaves, colliding
/// attempters each wait a fresh uniform backoff in `[1, max_backoff]` rounds.
pub fn aloha_schedule(
    n: usize,
    wishers: &[usize],
    max_backoff: u64,
    max_rounds: usize,
    rng: &mut RngStream,
) -> Result<AlohaSchedule> {
    ensure!(max_backoff >= 1, "max_backoff must be at least 1");
    ensure!(n >= 2, "ALOHA needs at least 2 players, got {n}");
    let wishers = check_index_set(n, wishers, "wisher")?;

    // (player, next attempt round)
    let mut pending: Vec<(usize, usize)> = wishers.iter().map(|&w| (w, 1)).collect();
    let mut schedule = AlohaSchedule {
        attempts: Vec::new(),
        transmissions: Vec::new(),
        completed: true,
        transcript: Transcript::new(),
        ledger: RandomnessLedger::new(),
    };
    let mut round = 1;
    while !pending.is_empty() {
        if round > max_rounds {
            schedule.completed = false;
            break;
        }
        let attempting: Vec<usize> = pending
            .iter()
            .filter(|(_, next)| *next == round)
            .map(|(p, _)| *p)
            .collect();
        if !attempting.is_empty() {
            let run = collision_detect(n, &attempting, rng)?;
            schedule.transcript.extend(run.transcript);
            schedule.ledger.append(run.ledger);
            if run.verdict.verdict == Verdict::ExactlyOne {
                schedule.transmissions.push((round, attempting[0]));
                pending.retain(|(p, _)| *p != attempting[0]);
            } else {
                for (p, next) in pending.iter_mut().filter(|(_, next)| *next == round) {
                    let wait = rng.range_inclusive(1, max_backoff);
                    schedule.ledger.record(*p, RandomnessKind::Backoff, wait);
                    *next = round + wait as usize;
                }
            }
        }
        schedule.attempts.push(attempting);
        round += 1;
    }
    Ok(schedule)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_wisher_first_round() {
        let s = aloha_schedule(4, &[2], 4, DEFAULT_ALOHA_CAP, &mut RngStream::new(0, 0)).unwrap();
        assert_eq!(s.transmissions, vec![(1, 2)]);
        assert!(s.completed);
        assert_eq!(s.rounds(), 1);
    }

    #[test]
    fn no_wishers_empty() {
        let s = aloha_schedule(4, &[], 4, DEFAULT_ALOHA_CAP, &mut RngStream::new(0, 0)).unwrap();
        assert!(s.attempts.is_empty());
        assert!(s.transmissions.is_empty());
        assert!(s.completed);
    }

    #[test]
    fn two_wishers_eventually_alone() {
        let mut total = 0;
        for seed in 0..200 {
            let s = aloha_schedule(5, &[0, 3], 4, DEFAULT_ALOHA_CAP, &mut RngStream::new(seed, 0)).unwrap();
            assert!(s.completed);
            let mut who: Vec<_> = s.transmissions.iter().map(|t| t.1).collect();
            who.sort();
            assert_eq!(who, vec![0, 3]);
            // the first round always collides
            assert_eq!(s.attempts[0], vec![0, 3]);
            total += s.rounds();
        }
        let mean = total as f64 / 200.0;
        assert!(mean > 2.0 && mean < 20.0, "mean rounds {mean}");
    }

    #[test]
    fn unit_backoff_never_resolves() {
        let s = aloha_schedule(4, &[0, 1], 1, 50, &mut RngStream::new(0, 0)).unwrap();
        assert!(!s.completed);
        assert!(s.transmissions.is_empty());
        assert!(aloha_schedule(4, &[0], 0, 10, &mut RngStream::new(0, 0)).is_err());
    }
}
