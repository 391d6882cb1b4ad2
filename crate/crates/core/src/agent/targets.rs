//! Temporal-difference targets with legality masking in both the max and
//! the argmax/eval paths.

use super::mlp::QNetwork;
use super::replay::Transition;
use crate::error::{Error, Result};

fn gather_next(batch: &[&Transition], dim: usize) -> Vec<f64> {
    let mut x = Vec::with_capacity(batch.len() * dim);
    for t in batch {
        x.extend_from_slice(&t.s_next);
    }
    x
}

fn masked_max(q: &[f64], mask: &[bool]) -> Result<f64> {
    let mut best: Option<f64> = None;
    for (i, &v) in q.iter().enumerate() {
        if mask[i] {
            best = Some(match best {
                Some(b) if b >= v => b,
                _ => v,
            });
        }
    }
    best.ok_or_else(|| Error::Contract("next-state mask has no legal action".into()))
}

fn masked_argmax(q: &[f64], mask: &[bool]) -> Result<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, &v) in q.iter().enumerate() {
        if !mask[i] {
            continue;
        }
        match best {
            Some((_, bv)) if v <= bv => {}
            _ => best = Some((i, v)),
        }
    }
    best.map(|(i, _)| i)
        .ok_or_else(|| Error::Contract("next-state mask has no legal action".into()))
}

/// One-step targets with the bootstrap max restricted to legal actions;
/// terminal transitions bootstrap nothing.
pub fn dqn_targets(batch: &[&Transition], target: &QNetwork, gamma: f64) -> Result<Vec<f64>> {
    let n_a = target.n_actions();
    let q = target.forward_batch(gather_next(batch, target.input_dim()), batch.len())?;
    batch
        .iter()
        .enumerate()
        .map(|(i, t)| {
            if t.done {
                Ok(t.r)
            } else {
                Ok(t.r + gamma * masked_max(&q[i * n_a..(i + 1) * n_a], &t.mask_next)?)
            }
        })
        .collect()
}

/// Bootstrap actions chosen by the online network over legal actions only.
pub fn ddqn_select_actions(batch: &[&Transition], online: &QNetwork) -> Result<Vec<usize>> {
    let n_a = online.n_actions();
    let q = online.forward_batch(gather_next(batch, online.input_dim()), batch.len())?;
    batch
        .iter()
        .enumerate()
        .map(|(i, t)| masked_argmax(&q[i * n_a..(i + 1) * n_a], &t.mask_next))
        .collect()
}

/// Double-DQN targets: selection by the online network, evaluation by the
/// target network at the selected (legal) action.
pub fn ddqn_targets(
    batch: &[&Transition],
    online: &QNetwork,
    target: &QNetwork,
    gamma: f64,
) -> Result<Vec<f64>> {
    let n_a = target.n_actions();
    let chosen = ddqn_select_actions(batch, online)?;
    let q = target.forward_batch(gather_next(batch, target.input_dim()), batch.len())?;
    Ok(batch
        .iter()
        .enumerate()
        .map(|(i, t)| {
            if t.done {
                t.r
            } else {
                debug_assert!(t.mask_next[chosen[i]], "ddqn selected an illegal action");
                t.r + gamma * q[i * n_a + chosen[i]]
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_pcg::Pcg64;

    fn toy_net(seed: u64) -> QNetwork {
        QNetwork::new(4, &[6, 5], 3, &mut Pcg64::seed_from_u64(seed)).unwrap()
    }

    fn transition(r: f64, done: bool, mask_next: Vec<bool>) -> Transition {
        Transition {
            s: vec![0.1, -0.2, 0.3, 0.4].into_boxed_slice(),
            a: 0,
            r,
            s_next: vec![0.5, 0.1, -0.3, 0.2].into_boxed_slice(),
            done,
            mask: vec![true, true, true].into_boxed_slice(),
            mask_next: mask_next.into_boxed_slice(),
        }
    }

    #[test]
    fn terminal_target_is_reward() {
        let net = toy_net(1);
        let t = transition(0.3, true, vec![true, true, true]);
        let targets = dqn_targets(&[&t], &net, 0.99).unwrap();
        assert_eq!(targets, vec![0.3]);
        let targets = ddqn_targets(&[&t], &net, &net, 0.99).unwrap();
        assert_eq!(targets, vec![0.3]);
    }

    #[test]
    fn masked_max_excludes_illegal_higher_value() {
        // Hand-built single-layer net whose q(s') is exactly [5, 1, 2]:
        // weights zero, biases [5, 1, 2].
        let net = QNetwork::from_params(vec![4, 3], vec![0.0; 12].into_iter()
            .chain([5.0, 1.0, 2.0]).collect()).unwrap();
        let t = transition(0.0, false, vec![false, true, true]);
        let targets = dqn_targets(&[&t], &net, 0.99).unwrap();
        // Legal next-q values are {1, 2}; the illegal 5 must not leak.
        assert!((targets[0] - 0.99 * 2.0).abs() < 1e-12);
    }

    #[test]
    fn gamma_zero_is_myopic() {
        let net = toy_net(2);
        let ts: Vec<Transition> = (0..4)
            .map(|i| transition(i as f64 * 0.1, false, vec![true, true, true]))
            .collect();
        let refs: Vec<&Transition> = ts.iter().collect();
        let targets = dqn_targets(&refs, &net, 0.0).unwrap();
        for (i, y) in targets.iter().enumerate() {
            assert_eq!(*y, i as f64 * 0.1);
        }
    }

    #[test]
    fn ddqn_equals_dqn_when_networks_coincide() {
        let net = toy_net(3);
        let mut other = toy_net(4);
        other.copy_params_from(&net);
        let ts: Vec<Transition> = (0..8)
            .map(|i| transition(0.01 * i as f64, i % 3 == 0, vec![true, i % 2 == 0, true]))
            .collect();
        let refs: Vec<&Transition> = ts.iter().collect();
        let dqn = dqn_targets(&refs, &net, 0.99).unwrap();
        let ddqn = ddqn_targets(&refs, &other, &net, 0.99).unwrap();
        // Exact equality, not tolerance: argmax-then-eval equals max when
        // selection and evaluation share parameters.
        for (a, b) in dqn.iter().zip(&ddqn) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn ddqn_arithmetic_with_fixed_values() {
        // Online net picks argmax over legal; target net evaluates it.
        // online q = [0, 9, 1] via biases; target q = [0, 0.5, 7].
        let online = QNetwork::from_params(vec![4, 3], vec![0.0; 12].into_iter()
            .chain([0.0, 9.0, 1.0]).collect()).unwrap();
        let target = QNetwork::from_params(vec![4, 3], vec![0.0; 12].into_iter()
            .chain([0.0, 0.5, 7.0]).collect()).unwrap();
        let t = transition(0.1, false, vec![true, true, false]);
        let y = ddqn_targets(&[&t], &online, &target, 0.99).unwrap();
        // a* = 1 (legal argmax of online), eval = 0.5: y = 0.1 + 0.99*0.5.
        assert!((y[0] - 0.595).abs() < 1e-12);
        // The illegal action 2 with the highest target value never leaks.
        let chosen = ddqn_select_actions(&[&t], &online).unwrap();
        assert_eq!(chosen, vec![1]);
    }
}
