//! FIFO replay ring storing transitions together with both legality masks.

use rand::Rng;
use rand_pcg::Pcg64;

use crate::error::{Error, Result};

/// One stored interaction. The action index lives in the agent's active
/// action space, and `mask`/`mask_next` are the legality vectors at `s` and
/// `s_next`.
#[derive(Debug, Clone, PartialEq)]
pub struct Transition {
    pub s: Box<[f64]>,
    pub a: usize,
    pub r: f64,
    pub s_next: Box<[f64]>,
    pub done: bool,
    pub mask: Box<[bool]>,
    pub mask_next: Box<[bool]>,
}

#[derive(Debug, Clone)]
pub struct ReplayBuffer {
    items: Vec<Transition>,
    capacity: usize,
    write: usize,
}

impl ReplayBuffer {
    pub fn new(capacity: usize) -> Self {
        assert!(capacity > 0, "replay capacity must be positive");
        ReplayBuffer { items: Vec::with_capacity(capacity.min(1 << 20)), capacity, write: 0 }
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    /// Append, evicting the oldest entry once full. Stored actions must be
    /// legal under their stored mask.
    pub fn push(&mut self, t: Transition) {
        debug_assert!(
            t.mask.get(t.a).copied().unwrap_or(false),
            "stored action must be legal under the stored mask"
        );
        if self.items.len() < self.capacity {
            self.items.push(t);
        } else {
            self.items[self.write] = t;
            self.write = (self.write + 1) % self.capacity;
        }
    }

    /// Uniform sample with replacement over current contents.
    pub fn sample(&self, batch: usize, rng: &mut Pcg64) -> Result<Vec<&Transition>> {
        if self.items.len() < batch {
            return Err(Error::Contract(format!(
                "replay holds {} transitions, cannot sample a batch of {batch}",
                self.items.len()
            )));
        }
        Ok((0..batch).map(|_| &self.items[rng.gen_range(0..self.items.len())]).collect())
    }

    pub fn iter(&self) -> impl Iterator<Item = &Transition> {
        self.items.iter()
    }
}
