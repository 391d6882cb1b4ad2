//! Discrete trading actions: the 10-operation extended interface and the
//! 3-operation simplified adapter.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Extended action set, executed at the next bar's open.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[repr(u8)]
pub enum Action {
    Hold = 0,
    OpenLong = 1,
    OpenShort = 2,
    PyramidLong = 3,
    PyramidShort = 4,
    MartingaleLong = 5,
    MartingaleShort = 6,
    Reduce = 7,
    Close = 8,
    Reverse = 9,
}

pub const EXTENDED_ACTIONS: [Action; 10] = [
    Action::Hold,
    Action::OpenLong,
    Action::OpenShort,
    Action::PyramidLong,
    Action::PyramidShort,
    Action::MartingaleLong,
    Action::MartingaleShort,
    Action::Reduce,
    Action::Close,
    Action::Reverse,
];

impl Action {
    pub fn id(self) -> usize {
        self as usize
    }

    pub fn from_id(id: usize) -> Result<Action> {
        EXTENDED_ACTIONS
            .get(id)
            .copied()
            .ok_or_else(|| Error::Contract(format!("extended action id {id} out of range")))
    }
}

/// Simplified target-position actions, adapted to extended operations
/// based on the current position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[repr(u8)]
pub enum SimpleAction {
    Hold = 0,
    TargetLong = 1,
    TargetShort = 2,
}

impl SimpleAction {
    pub fn id(self) -> usize {
        self as usize
    }

    pub fn from_id(id: usize) -> Result<SimpleAction> {
        match id {
            0 => Ok(SimpleAction::Hold),
            1 => Ok(SimpleAction::TargetLong),
            2 => Ok(SimpleAction::TargetShort),
            _ => Err(Error::Contract(format!("simplified action id {id} out of range"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ActionMode {
    Simplified,
    Extended,
}

impl ActionMode {
    /// Active action count n_a.
    pub fn n_actions(self) -> usize {
        match self {
            ActionMode::Simplified => 3,
            ActionMode::Extended => 10,
        }
    }
}

/// Boolean legality vector over the active action space. HOLD (index 0) is
/// always legal, so every mask has at least one set bit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LegalMask {
    bits: Vec<bool>,
}

impl LegalMask {
    pub fn new(bits: Vec<bool>) -> Self {
        debug_assert!(bits.first().copied().unwrap_or(false), "HOLD must be legal");
        LegalMask { bits }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn is_legal(&self, id: usize) -> bool {
        self.bits.get(id).copied().unwrap_or(false)
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn legal_ids(&self) -> Vec<usize> {
        self.bits.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i).collect()
    }

    pub fn count_legal(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    /// Mask bits as 0.0/1.0 reals for the flat observation vector.
    pub fn as_f64(&self) -> Vec<f64> {
        self.bits.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect()
    }

    /// Compact 0/1 encoding for logs.
    pub fn as_u8(&self) -> Vec<u8> {
        self.bits.iter().map(|&b| b as u8).collect()
    }
}
