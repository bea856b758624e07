use super::{check_index_set, collision_detect, CollisionRun, Verdict};
use crate::error::{ensure, Result};
use crate::rng::RngStream;

#[derive(Debug, Clone)]
pub struct Election {
    /// `(sender, receiver)` when both detections found exactly one wisher and
    /// the two are different players.
    pub pair: Option<(usize, usize)>,
    pub sender_run: CollisionRun,
    pub receiver_run: CollisionRun,
}

/// Two back-to-back collision detections, one among sender wishers and one
/// among receiver wishers.
pub fn elect_sender_receiver(
    n: usize,
    sender_wishers: &[usize],
    receiver_wishers: &[usize],
    rng: &mut RngStream,
) -> Result<Election> {
    ensure!(n >= 3, "election needs at least 3 players, got {n}");
    let senders = check_index_set(n, sender_wishers, "sender wisher")?;
    let receivers = check_index_set(n, receiver_wishers, "receiver wisher")?;
    let sender_run = collision_detect(n, &senders, rng)?;
    let receiver_run = collision_detect(n, &receivers, rng)?;
    let pair = match (sender_run.verdict.verdict, receiver_run.verdict.verdict) {
        (Verdict::ExactlyOne, Verdict::ExactlyOne) if senders[0] != receivers[0] => Some((senders[0], receivers[0])),
        _ => None,
    };
    Ok(Election {
        pair,
        sender_run,
        receiver_run,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn elects_unique_pair() {
        let e = elect_sender_receiver(5, &[1], &[4], &mut RngStream::new(0, 0)).unwrap();
        assert_eq!(e.pair, Some((1, 4)));
    }

    #[test]
    fn collisions_and_absences_fail() {
        let mut rng = RngStream::new(1, 0);
        assert_eq!(elect_sender_receiver(5, &[0, 2], &[4], &mut rng).unwrap().pair, None);
        assert_eq!(elect_sender_receiver(5, &[0], &[], &mut rng).unwrap().pair, None);
        assert_eq!(elect_sender_receiver(5, &[3], &[3], &mut rng).unwrap().pair, None);
        assert!(elect_sender_receiver(2, &[0], &[1], &mut rng).is_err());
    }
}
