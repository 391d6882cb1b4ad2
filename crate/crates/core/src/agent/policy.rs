//! Mask-aware epsilon-greedy action selection and the linear epsilon decay.

use rand::Rng;
use rand_pcg::Pcg64;
use serde::{Deserialize, Serialize};

use crate::env::LegalMask;
use crate::error::{Error, Result};

/// Linear decay from `start` to `end` over `decay_steps`, constant after.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EpsilonSchedule {
    pub start: f64,
    pub end: f64,
    pub decay_steps: u64,
}

impl Default for EpsilonSchedule {
    fn default() -> Self {
        EpsilonSchedule { start: 1.0, end: 0.01, decay_steps: 30_000 }
    }
}

impl EpsilonSchedule {
    pub fn value(&self, step: u64) -> f64 {
        if step >= self.decay_steps {
            return self.end;
        }
        self.start + (self.end - self.start) * (step as f64 / self.decay_steps as f64)
    }
}

/// Argmax over legal actions with ties broken toward the lowest id.
pub fn masked_argmax(q: &[f64], mask: &LegalMask) -> Result<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, &v) in q.iter().enumerate() {
        if !mask.is_legal(i) {
            continue;
        }
        match best {
            Some((_, bv)) if v <= bv => {}
            _ => best = Some((i, v)),
        }
    }
    best.map(|(i, _)| i)
        .ok_or_else(|| Error::Contract("masked argmax over an all-false mask".into()))
}

/// Epsilon-greedy restricted to legal actions: explore uniformly over the
/// legal set, otherwise take the legal argmax.
pub fn select_action(q: &[f64], mask: &LegalMask, epsilon: f64, rng: &mut Pcg64)
    -> Result<usize> {
    if q.len() != mask.len() {
        return Err(Error::Contract(format!(
            "q-vector has {} entries but mask has {}",
            q.len(),
            mask.len()
        )));
    }
    if mask.count_legal() == 0 {
        return Err(Error::Contract("no legal actions in mask".into()));
    }
    if rng.gen::<f64>() < epsilon {
        let legal = mask.legal_ids();
        Ok(legal[rng.gen_range(0..legal.len())])
    } else {
        masked_argmax(q, mask)
    }
}
