use num_complex::Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Role {
    Sender,
    Receiver,
    None,
}

/// How a player deviates from the protocol, if at all.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Behavior {
    #[default]
    Honest,
    /// Never uses the broadcast channel.
    Withhold,
    /// Applies an extra phase flip to their qubit.
    ExtraFlip,
    /// Broadcasts the complement of their measurement outcome.
    InvertOutcome,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DataItem {
    Bit(u8),
    Qubit(Complex64, Complex64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlayerConfig {
    pub id: usize,
    pub role: Role,
    pub data_item: Option<DataItem>,
    pub behavior: Behavior,
}

impl PlayerConfig {
    pub fn bystander(id: usize) -> Self {
        Self {
            id,
            role: Role::None,
            data_item: None,
            behavior: Behavior::Honest,
        }
    }

    pub fn sender(id: usize, d: u8) -> Self {
        Self {
            id,
            role: Role::Sender,
            data_item: Some(DataItem::Bit(d & 1)),
            behavior: Behavior::Honest,
        }
    }

    pub fn with_behavior(mut self, behavior: Behavior) -> Self {
        self.behavior = behavior;
        self
    }

    pub fn honest(&self) -> bool {
        self.behavior == Behavior::Honest
    }

    /// Whether this player flips the shared state's phase in an ANON round.
    pub(crate) fn flips(&self) -> bool {
        let data_flip = self.role == Role::Sender && matches!(self.data_item, Some(DataItem::Bit(1)));
        data_flip ^ (self.behavior == Behavior::ExtraFlip)
    }
}
