//! Feed-forward Q-network with rectifier hidden layers, a linear head, and
//! hand-written backpropagation over a single flat parameter vector.

use rand::Rng;
use rand_pcg::Pcg64;

use super::linalg::{add_row_bias, col_sums_acc, matmul_acc, matmul_at_b_acc};
use crate::error::{Error, Result};

/// Layer parameter views into the flat vector: weights are row-major
/// [n_out x n_in], followed by the bias.
#[derive(Debug, Clone, Copy)]
struct LayerSpec {
    n_in: usize,
    n_out: usize,
    w_off: usize,
    b_off: usize,
}

#[derive(Debug, Clone)]
pub struct QNetwork {
    dims: Vec<usize>,
    specs: Vec<LayerSpec>,
    params: Vec<f64>,
    /// Transposed weight caches ([n_in x n_out]) kept in sync with `params`
    /// so batched forwards run in accumulate form.
    wt: Vec<Vec<f64>>,
}

/// Post-activation values per layer for one batch: `acts[0]` is the input
/// matrix, `acts[i]` the output of layer i (ReLU applied on hidden layers).
pub struct Activations {
    pub batch: usize,
    pub acts: Vec<Vec<f64>>,
}

impl Activations {
    pub fn q_values(&self) -> &[f64] {
        self.acts.last().expect("non-empty activations")
    }
}

fn layer_specs(dims: &[usize]) -> (Vec<LayerSpec>, usize) {
    let mut specs = Vec::with_capacity(dims.len() - 1);
    let mut off = 0;
    for l in 0..dims.len() - 1 {
        let (n_in, n_out) = (dims[l], dims[l + 1]);
        specs.push(LayerSpec { n_in, n_out, w_off: off, b_off: off + n_in * n_out });
        off += n_in * n_out + n_out;
    }
    (specs, off)
}

impl QNetwork {
    /// Build with uniform init in ±sqrt(6 / (fan_in + fan_out)) per layer
    /// and zero biases, drawn from the given stream.
    pub fn new(input_dim: usize, hidden_dims: &[usize], n_actions: usize, rng: &mut Pcg64)
        -> Result<Self> {
        let mut dims = Vec::with_capacity(hidden_dims.len() + 2);
        dims.push(input_dim);
        dims.extend_from_slice(hidden_dims);
        dims.push(n_actions);
        if dims.contains(&0) {
            return Err(Error::Config(format!("network dims must be positive, got {dims:?}")));
        }
        let (specs, n_params) = layer_specs(&dims);
        let mut params = vec![0.0f64; n_params];
        for spec in &specs {
            let bound = (6.0 / (spec.n_in + spec.n_out) as f64).sqrt();
            for w in &mut params[spec.w_off..spec.w_off + spec.n_in * spec.n_out] {
                *w = rng.gen_range(-bound..bound);
            }
        }
        let mut net = QNetwork { dims, specs, params, wt: Vec::new() };
        net.refresh_transposes();
        Ok(net)
    }

    /// Rebuild from explicit parameters (checkpoint restore).
    pub fn from_params(dims: Vec<usize>, params: Vec<f64>) -> Result<Self> {
        let (specs, n_params) = layer_specs(&dims);
        if params.len() != n_params {
            return Err(Error::Contract(format!(
                "parameter vector has {} entries, dims {dims:?} need {n_params}",
                params.len()
            )));
        }
        let mut net = QNetwork { dims, specs, params, wt: Vec::new() };
        net.refresh_transposes();
        Ok(net)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn input_dim(&self) -> usize {
        self.dims[0]
    }

    pub fn n_actions(&self) -> usize {
        *self.dims.last().unwrap()
    }

    pub fn n_params(&self) -> usize {
        self.params.len()
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    /// Mutable parameter access; callers must refresh the transpose caches
    /// afterwards.
    pub fn params_mut(&mut self) -> &mut [f64] {
        &mut self.params
    }

    pub fn refresh_transposes(&mut self) {
        self.wt = self
            .specs
            .iter()
            .map(|spec| {
                let w = &self.params[spec.w_off..spec.w_off + spec.n_in * spec.n_out];
                let mut t = vec![0.0f64; spec.n_in * spec.n_out];
                for o in 0..spec.n_out {
                    for i in 0..spec.n_in {
                        t[i * spec.n_out + o] = w[o * spec.n_in + i];
                    }
                }
                t
            })
            .collect();
    }

    /// Hard copy of another network's parameters (target sync).
    pub fn copy_params_from(&mut self, other: &QNetwork) {
        debug_assert_eq!(self.dims, other.dims);
        self.params.copy_from_slice(&other.params);
        self.refresh_transposes();
    }

    /// Batched forward pass keeping every activation for backprop. `x` is
    /// row-major [batch x input_dim] and is consumed as activation zero.
    pub fn forward_batch_acts(&self, x: Vec<f64>, batch: usize) -> Result<Activations> {
        if x.len() != batch * self.input_dim() {
            return Err(Error::Contract(format!(
                "batch input is {} long, expected {} ({} x {})",
                x.len(),
                batch * self.input_dim(),
                batch,
                self.input_dim()
            )));
        }
        let mut acts = Vec::with_capacity(self.specs.len() + 1);
        acts.push(x);
        for (l, spec) in self.specs.iter().enumerate() {
            let input = &acts[l];
            let mut out = vec![0.0f64; batch * spec.n_out];
            matmul_acc(input, &self.wt[l], &mut out, batch, spec.n_in, spec.n_out);
            add_row_bias(&mut out, &self.params[spec.b_off..spec.b_off + spec.n_out]);
            if l + 1 < self.specs.len() {
                for v in &mut out {
                    if *v < 0.0 {
                        *v = 0.0;
                    }
                }
            }
            acts.push(out);
        }
        Ok(Activations { batch, acts })
    }

    /// Batched Q-values only.
    pub fn forward_batch(&self, x: Vec<f64>, batch: usize) -> Result<Vec<f64>> {
        Ok(self.forward_batch_acts(x, batch)?.acts.pop().unwrap())
    }

    /// Q-values for a single state.
    pub fn forward(&self, s: &[f64]) -> Result<Vec<f64>> {
        self.forward_batch(s.to_vec(), 1)
    }

    /// Backpropagate `d_head` (gradient of the loss w.r.t. the head output,
    /// row-major [batch x n_actions]) through stored activations, returning
    /// the flat parameter gradient.
    pub fn backward(&self, acts: &Activations, d_head: Vec<f64>) -> Vec<f64> {
        let batch = acts.batch;
        let mut grads = vec![0.0f64; self.params.len()];
        let mut delta = d_head;
        for (l, spec) in self.specs.iter().enumerate().rev() {
            let input = &acts.acts[l];
            // Weight gradient: delta^T (out x B) times input (B x in).
            let gw = &mut grads[spec.w_off..spec.w_off + spec.n_in * spec.n_out];
            matmul_at_b_acc(&delta, input, gw, batch, spec.n_out, spec.n_in);
            let gb = &mut grads[spec.b_off..spec.b_off + spec.n_out];
            col_sums_acc(&delta, gb, spec.n_out);
            if l == 0 {
                break;
            }
            // Input gradient: delta (B x out) times W (out x in), then the
            // rectifier mask of the producing layer.
            let w = &self.params[spec.w_off..spec.w_off + spec.n_in * spec.n_out];
            let mut d_prev = vec![0.0f64; batch * spec.n_in];
            matmul_acc(&delta, w, &mut d_prev, batch, spec.n_out, spec.n_in);
            for (d, &a) in d_prev.iter_mut().zip(input.iter()) {
                if a <= 0.0 {
                    *d = 0.0;
                }
            }
            delta = d_prev;
        }
        grads
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn rng() -> Pcg64 {
        Pcg64::seed_from_u64(7)
    }

    #[test]
    fn zero_network_outputs_zero() {
        let net = QNetwork::from_params(vec![4, 3, 2], vec![0.0; 4 * 3 + 3 + 3 * 2 + 2]).unwrap();
        let q = net.forward(&[1.0, -2.0, 0.5, 3.0]).unwrap();
        assert_eq!(q, vec![0.0, 0.0]);
    }

    /// Hand-evaluated two-layer toy: one hidden unit, identity-like weights.
    #[test]
    fn hand_computed_toy_forward() {
        // dims [2, 1, 1]: hidden = relu(1*x0 + (-1)*x1 + 0.5), out = 2*h - 1.
        let params = vec![1.0, -1.0, 0.5, 2.0, -1.0];
        let net = QNetwork::from_params(vec![2, 1, 1], params).unwrap();
        let q = net.forward(&[2.0, 1.0]).unwrap();
        // hidden = relu(2 - 1 + 0.5) = 1.5; out = 2*1.5 - 1 = 2.0
        assert!((q[0] - 2.0).abs() < 1e-15);
        // Negative pre-activation clamps to zero: out = -1.
        let q = net.forward(&[0.0, 2.0]).unwrap();
        assert!((q[0] + 1.0).abs() < 1e-15);
    }

    #[test]
    fn batch_equals_per_sample() {
        let net = QNetwork::new(6, &[5, 4], 3, &mut rng()).unwrap();
        let xs: Vec<Vec<f64>> = (0..9)
            .map(|i| (0..6).map(|j| ((i * 6 + j) as f64 * 0.13).sin()).collect())
            .collect();
        let flat: Vec<f64> = xs.iter().flatten().copied().collect();
        let batch_q = net.forward_batch(flat, 9).unwrap();
        for (i, x) in xs.iter().enumerate() {
            let single = net.forward(x).unwrap();
            for j in 0..3 {
                assert_eq!(batch_q[i * 3 + j].to_bits(), single[j].to_bits());
            }
        }
    }

    #[test]
    fn dimension_mismatch_is_contract_error() {
        let net = QNetwork::new(6, &[4], 3, &mut rng()).unwrap();
        assert!(net.forward(&[1.0; 5]).is_err());
        assert!(QNetwork::from_params(vec![2, 2], vec![0.0; 3]).is_err());
    }

    #[test]
    fn copy_params_is_deep() {
        let mut a = QNetwork::new(4, &[3], 2, &mut rng()).unwrap();
        let b = QNetwork::new(4, &[3], 2, &mut Pcg64::seed_from_u64(9)).unwrap();
        a.copy_params_from(&b);
        assert_eq!(a.params(), b.params());
        a.params_mut()[0] += 1.0;
        a.refresh_transposes();
        assert_ne!(a.params()[0], b.params()[0]);
        let x = [0.3, -0.4, 1.0, 0.8];
        assert_ne!(a.forward(&x).unwrap(), b.forward(&x).unwrap());
    }

    #[test]
    fn init_is_seed_deterministic_and_bounded() {
        let a = QNetwork::new(10, &[8, 6], 4, &mut Pcg64::seed_from_u64(42)).unwrap();
        let b = QNetwork::new(10, &[8, 6], 4, &mut Pcg64::seed_from_u64(42)).unwrap();
        assert_eq!(a.params(), b.params());
        let bound = (6.0f64 / (10 + 8) as f64).sqrt();
        assert!(a.params()[..80].iter().all(|w| w.abs() <= bound));
    }
}
