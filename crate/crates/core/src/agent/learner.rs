//! The optimization step: Huber loss on taken-action values, analytic
//! gradients, global-norm clipping, Adam; plus a finite-difference oracle
//! for gradient audits.

use super::mlp::QNetwork;
use super::optim::{clip_global_norm, Adam};
use super::replay::Transition;
use crate::error::{Error, Result};

fn huber(e: f64, delta: f64) -> f64 {
    let a = e.abs();
    if a <= delta {
        0.5 * e * e
    } else {
        delta * (a - 0.5 * delta)
    }
}

fn huber_grad(e: f64, delta: f64) -> f64 {
    if e.abs() <= delta {
        e
    } else {
        delta * e.signum()
    }
}

/// Mean Huber loss of q(s_i, a_i) against `targets` over a batch.
pub fn batch_loss(
    net: &QNetwork,
    batch: &[&Transition],
    targets: &[f64],
    delta: f64,
) -> Result<f64> {
    let n_a = net.n_actions();
    let mut x = Vec::with_capacity(batch.len() * net.input_dim());
    for t in batch {
        x.extend_from_slice(&t.s);
    }
    let q = net.forward_batch(x, batch.len())?;
    let mut loss = 0.0;
    for (i, t) in batch.iter().enumerate() {
        loss += huber(q[i * n_a + t.a] - targets[i], delta);
    }
    Ok(loss / batch.len() as f64)
}

/// One optimization step. Returns the loss and the pre-clip gradient norm.
pub fn train_step(
    net: &mut QNetwork,
    opt: &mut Adam,
    batch: &[&Transition],
    targets: &[f64],
    huber_delta: f64,
    grad_clip_norm: f64,
) -> Result<(f64, f64)> {
    if batch.len() != targets.len() {
        return Err(Error::Contract("batch/target length mismatch".into()));
    }
    let b = batch.len();
    let n_a = net.n_actions();
    let mut x = Vec::with_capacity(b * net.input_dim());
    for t in batch {
        debug_assert!(t.mask[t.a], "taken action must be legal under its stored mask");
        x.extend_from_slice(&t.s);
    }
    let acts = net.forward_batch_acts(x, b)?;
    let q = acts.q_values();
    let mut loss = 0.0;
    let mut d_head = vec![0.0f64; b * n_a];
    for (i, t) in batch.iter().enumerate() {
        let e = q[i * n_a + t.a] - targets[i];
        loss += huber(e, huber_delta);
        d_head[i * n_a + t.a] = huber_grad(e, huber_delta) / b as f64;
    }
    loss /= b as f64;
    if !loss.is_finite() {
        return Err(Error::TrainingFault(format!(
            "non-finite loss over a batch of {b} (first target {:?})",
            targets.first()
        )));
    }
    let mut grads = net.backward(&acts, d_head);
    let pre_clip_norm = clip_global_norm(&mut grads, grad_clip_norm);
    opt.update(net.params_mut(), &grads);
    net.refresh_transposes();
    Ok((loss, pre_clip_norm))
}

/// Central finite differences of the batch loss w.r.t. selected parameters.
/// Independent of the analytic backward path; used to audit it.
pub fn finite_difference_grads(
    net: &QNetwork,
    batch: &[&Transition],
    targets: &[f64],
    delta: f64,
    param_indices: &[usize],
    h: f64,
) -> Result<Vec<f64>> {
    let mut probe = net.clone();
    let mut out = Vec::with_capacity(param_indices.len());
    for &idx in param_indices {
        let orig = probe.params()[idx];
        probe.params_mut()[idx] = orig + h;
        probe.refresh_transposes();
        let up = batch_loss(&probe, batch, targets, delta)?;
        probe.params_mut()[idx] = orig - h;
        probe.refresh_transposes();
        let down = batch_loss(&probe, batch, targets, delta)?;
        probe.params_mut()[idx] = orig;
        probe.refresh_transposes();
        out.push((up - down) / (2.0 * h));
    }
    Ok(out)
}

/// Analytic flat gradient of the batch loss (no update applied).
pub fn analytic_grads(
    net: &QNetwork,
    batch: &[&Transition],
    targets: &[f64],
    delta: f64,
) -> Result<Vec<f64>> {
    let b = batch.len();
    let n_a = net.n_actions();
    let mut x = Vec::with_capacity(b * net.input_dim());
    for t in batch {
        x.extend_from_slice(&t.s);
    }
    let acts = net.forward_batch_acts(x, b)?;
    let q = acts.q_values();
    let mut d_head = vec![0.0f64; b * n_a];
    for (i, t) in batch.iter().enumerate() {
        let e = q[i * n_a + t.a] - targets[i];
        d_head[i * n_a + t.a] = huber_grad(e, delta) / b as f64;
    }
    Ok(net.backward(&acts, d_head))
}
