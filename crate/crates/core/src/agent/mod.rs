//! Value-based learner: MLP Q-network with manual differentiation, Adam,
//! Huber loss, mask-aware exploration, masked replay, and DQN/DDQN targets
//! with hard target-network synchronization.

mod checkpoint;
mod learner;
mod linalg;
mod mlp;
mod optim;
mod policy;
mod replay;
mod targets;

pub use checkpoint::{load_checkpoint, save_checkpoint, Checkpoint};
pub use learner::{analytic_grads, batch_loss, finite_difference_grads, train_step};
pub use mlp::{Activations, QNetwork};
pub use optim::{clip_global_norm, Adam, AdamConfig};
pub use policy::{masked_argmax, select_action, EpsilonSchedule};
pub use replay::{ReplayBuffer, Transition};
pub use targets::{ddqn_select_actions, ddqn_targets, dqn_targets};

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AgentKind {
    Dqn,
    #[serde(rename = "doubledqn")]
    DoubleDqn,
}

/// Hard sync: the target network becomes a bit-identical copy of the online
/// network.
pub fn sync_target(target: &mut QNetwork, online: &QNetwork) {
    target.copy_params_from(online);
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_pcg::Pcg64;

    #[test]
    fn sync_makes_targets_coincide_and_is_idempotent() {
        let mut rng = Pcg64::seed_from_u64(1);
        let online = QNetwork::new(5, &[4], 3, &mut rng).unwrap();
        let mut target = QNetwork::new(5, &[4], 3, &mut rng).unwrap();
        assert_ne!(online.params(), target.params());
        sync_target(&mut target, &online);
        assert_eq!(online.params(), target.params());
        let snapshot = target.params().to_vec();
        sync_target(&mut target, &online);
        assert_eq!(target.params(), snapshot.as_slice());
    }

    #[test]
    fn mutating_online_after_sync_leaves_target_unchanged() {
        let mut rng = Pcg64::seed_from_u64(2);
        let mut online = QNetwork::new(5, &[4], 3, &mut rng).unwrap();
        let mut target = QNetwork::new(5, &[4], 3, &mut rng).unwrap();
        sync_target(&mut target, &online);
        let snapshot = target.params().to_vec();
        online.params_mut()[0] += 5.0;
        online.refresh_transposes();
        assert_eq!(target.params(), snapshot.as_slice());
    }
}
