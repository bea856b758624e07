use serde::{Deserialize, Serialize};

/// Outcomes of a computational-basis measurement, one bit per measured qubit.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MeasurementRecord {
    outcomes: Vec<u8>,
    hamming_weight: usize,
    parity: u8,
}

impl MeasurementRecord {
    pub fn new(outcomes: Vec<u8>) -> Self {
        debug_assert!(outcomes.iter().all(|b| *b <= 1));
        let hamming_weight = outcomes.iter().filter(|b| **b == 1).count();
        Self {
            outcomes,
            hamming_weight,
            parity: (hamming_weight % 2) as u8,
        }
    }

    pub fn outcomes(&self) -> &[u8] {
        &self.outcomes
    }

    pub fn hamming_weight(&self) -> usize {
        self.hamming_weight
    }

    pub fn parity(&self) -> u8 {
        self.parity
    }

    pub fn len(&self) -> usize {
        self.outcomes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outcomes.is_empty()
    }
}
