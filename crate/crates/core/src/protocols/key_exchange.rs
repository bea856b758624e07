use super::{anon_send, check_index, collision_detect, RandomnessKind, RandomnessLedger, Transcript, Verdict};
use crate::error::{ensure, Error, Result};
use crate::rng::RngStream;

/// Retries allowed per index before slot reservation is declared failed.
const MAX_SLOT_RETRIES: usize = 256;

#[derive(Debug, Clone)]
pub struct KeyExchange {
    /// Key as derived by `node_i`.
    pub key_i: Vec<u8>,
    /// Key as derived by `node_j`.
    pub key_j: Vec<u8>,
    /// Public announcements per index, in slot order.
    pub announcements: Vec<(u8, u8)>,
    /// Indices whose announcements differed and so contribute a key bit.
    pub kept: Vec<usize>,
    pub transcript: Transcript,
    pub ledger: RandomnessLedger,
}

/// Anonymous key exchange between `node_i` and `node_j` over `key_len` indices
/// with freshly drawn bits.
pub fn anonymous_key_exchange(
    n: usize,
    node_i: usize,
    node_j: usize,
    key_len: usize,
    rng: &mut RngStream,
) -> Result<KeyExchange> {
    let bits_i: Vec<u8> = (0..key_len).map(|_| rng.bit()).collect();
    let bits_j: Vec<u8> = (0..key_len).map(|_| rng.bit()).collect();
    anonymous_key_exchange_with_bits(n, node_i, node_j, &bits_i, &bits_j, rng)
}

/// Key exchange with the nodes' random bits supplied.
///
/// For every index both nodes announce their bit through ANON, one per slot.
/// Slots are chosen privately at random and reserved with collision
/// detection (redrawn on collision), so outsiders cannot tell whose
/// announcement is whose. Indices with equal announcements are discarded; on
/// the rest the key bit is `node_i`'s value, which `node_j` reads off the slot
/// it did not use.
pub fn anonymous_key_exchange_with_bits(
    n: usize,
    node_i: usize,
    node_j: usize,
    bits_i: &[u8],
    bits_j: &[u8],
    rng: &mut RngStream,
) -> Result<KeyExchange> {
    ensure!(n >= 3, "key exchange needs at least 3 players, got {n}");
    check_index(n, node_i, "node")?;
    check_index(n, node_j, "node")?;
    ensure!(node_i != node_j, "key exchange needs two distinct nodes");
    ensure!(bits_i.len() == bits_j.len(), "both nodes need the same number of bits");

    let mut out = KeyExchange {
        key_i: Vec::new(),
        key_j: Vec::new(),
        announcements: Vec::with_capacity(bits_i.len()),
        kept: Vec::new(),
        transcript: Transcript::new(),
        ledger: RandomnessLedger::new(),
    };

    for (index, (&ri, &rj)) in bits_i.iter().zip(bits_j).enumerate() {
        out.ledger.record(node_i, RandomnessKind::KeyBit, ri as u64);
        out.ledger.record(node_j, RandomnessKind::KeyBit, rj as u64);
        let slot_i = reserve_slots(n, node_i, node_j, rng, &mut out)?;

        let mut announced = [0u8; 2];
        for (slot, value) in announced.iter_mut().enumerate() {
            let (announcer, bit) = if slot == slot_i { (node_i, ri) } else { (node_j, rj) };
            let run = anon_send(n, announcer, bit, rng)?;
            out.transcript.extend(run.transcript);
            out.ledger.append(run.ledger);
            *value = run.decoded.ok_or_else(|| Error::invalid("ANON sub-run aborted"))?;
        }
        out.announcements.push((announced[0], announced[1]));

        if announced[0] != announced[1] {
            out.kept.push(index);
            // node_j knows only its own slot; node_i's bit is in the other one.
            let slot_j = 1 - slot_i;
            out.key_i.push(ri);
            out.key_j.push(announced[1 - slot_j]);
        }
    }
    Ok(out)
}

/// Draws private slot choices until collision detection certifies one
/// announcer per slot. Returns `node_i`'s slot.
fn reserve_slots(n: usize, node_i: usize, node_j: usize, rng: &mut RngStream, out: &mut KeyExchange) -> Result<usize> {
    for _ in 0..MAX_SLOT_RETRIES {
        let slot_i = rng.bit() as usize;
        let slot_j = rng.bit() as usize;
        out.ledger.record(node_i, RandomnessKind::SlotChoice, slot_i as u64);
        out.ledger.record(node_j, RandomnessKind::SlotChoice, slot_j as u64);
        let mut clear = true;
        for slot in 0..2 {
            let wishers: Vec<usize> = [(node_i, slot_i), (node_j, slot_j)]
                .iter()
                .filter(|(_, s)| *s == slot)
                .map(|(p, _)| *p)
                .collect();
            let run = collision_detect(n, &wishers, rng)?;
            out.transcript.extend(run.transcript);
            out.ledger.append(run.ledger);
            clear &= run.verdict.verdict == Verdict::ExactlyOne;
        }
        if clear {
            return Ok(slot_i);
        }
    }
    Err(Error::invalid("slot reservation did not converge"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equal_bits_give_empty_key() {
        let bits = [0, 1, 1, 0, 1];
        let kx = anonymous_key_exchange_with_bits(4, 0, 2, &bits, &bits, &mut RngStream::new(0, 0)).unwrap();
        assert!(kx.key_i.is_empty() && kx.key_j.is_empty());
    }

    #[test]
    fn opposite_bits_give_full_key() {
        let bits_i = [0, 1, 1, 0, 1, 0, 0, 1];
        let bits_j: Vec<u8> = bits_i.iter().map(|b| b ^ 1).collect();
        for seed in 0..20 {
            let kx = anonymous_key_exchange_with_bits(5, 1, 3, &bits_i, &bits_j, &mut RngStream::new(seed, 0)).unwrap();
            assert_eq!(kx.key_i, bits_i.to_vec());
            assert_eq!(kx.key_i, kx.key_j);
        }
    }

    #[test]
    fn survival_near_half() {
        let kx = anonymous_key_exchange(4, 0, 1, 1000, &mut RngStream::new(42, 0)).unwrap();
        assert_eq!(kx.key_i, kx.key_j);
        let f = kx.kept.len() as f64 / 1000.0;
        assert!((f - 0.5).abs() < 0.05, "survival {f}");
    }

    #[test]
    fn rejects_bad_nodes() {
        let mut rng = RngStream::new(0, 0);
        assert!(anonymous_key_exchange(4, 1, 1, 4, &mut rng).is_err());
        assert!(anonymous_key_exchange(2, 0, 1, 4, &mut rng).is_err());
    }
}
