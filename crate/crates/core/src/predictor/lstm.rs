//! Stacked LSTM with explicit backpropagation through time.
//!
//! All parameters live in one flat vector so that optimizers, gradient
//! checks and checkpoints can treat the model as a single tensor. Each layer
//! owns a `4H × (I + H)` weight block (rows grouped by gate in the order
//! input, forget, output, candidate; columns input-first) followed by a
//! `4H` bias block.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Gate {
    Input = 0,
    Forget = 1,
    Output = 2,
    Candidate = 3,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct LayerShape {
    pub input: usize,
    pub hidden: usize,
    pub w_off: usize,
    pub b_off: usize,
}

impl LayerShape {
    fn cols(&self) -> usize {
        self.input + self.hidden
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RecurrentModel {
    input_dim: usize,
    layers: Vec<LayerShape>,
    params: Vec<f64>,
}

#[inline]
fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Activations of one layer at one step, kept for the backward pass.
struct StepCache {
    /// `[x_t; h_{t-1}]`
    xh: Vec<f64>,
    c_prev: Vec<f64>,
    /// Post-activation gates, `4H`, ordered as in [`Gate`].
    gates: Vec<f64>,
    tanh_c: Vec<f64>,
}

struct LayerCache {
    steps: Vec<StepCache>,
}

impl RecurrentModel {
    /// All-zero model with hidden widths `layer_sizes` over `input_dim` inputs.
    pub fn zeros(input_dim: usize, layer_sizes: &[usize]) -> Result<Self> {
        if input_dim == 0 || layer_sizes.is_empty() || layer_sizes.contains(&0) {
            return Err(Error::InvalidArgument(format!(
                "invalid recurrent shape: input {input_dim}, layers {layer_sizes:?}"
            )));
        }
        let mut layers = Vec::with_capacity(layer_sizes.len());
        let mut offset = 0;
        let mut input = input_dim;
        for &hidden in layer_sizes {
            let w_len = 4 * hidden * (input + hidden);
            layers.push(LayerShape {
                input,
                hidden,
                w_off: offset,
                b_off: offset + w_len,
            });
            offset += w_len + 4 * hidden;
            input = hidden;
        }
        Ok(RecurrentModel {
            input_dim,
            layers,
            params: vec![0.0; offset],
        })
    }

    /// Weights uniform in `±1/sqrt(fan_in)` with `fan_in = I + H`; biases zero
    /// except the forget gate, which starts at one.
    pub fn init(input_dim: usize, layer_sizes: &[usize], seed: u64) -> Result<Self> {
        let mut m = Self::zeros(input_dim, layer_sizes)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for l in m.layers.clone() {
            let bound = 1.0 / (l.cols() as f64).sqrt();
            for w in &mut m.params[l.w_off..l.b_off] {
                *w = rng.random_range(-bound..=bound);
            }
            let forget = l.b_off + l.hidden;
            for b in &mut m.params[forget..forget + l.hidden] {
                *b = 1.0;
            }
        }
        Ok(m)
    }

    /// Rebuild a model from a flat parameter vector.
    pub fn from_params(input_dim: usize, layer_sizes: &[usize], params: Vec<f64>) -> Result<Self> {
        let mut m = Self::zeros(input_dim, layer_sizes)?;
        if params.len() != m.params.len() {
            return Err(Error::ShapeMismatch {
                expected: m.params.len(),
                actual: params.len(),
            });
        }
        if params.iter().any(|p| !p.is_finite()) {
            return Err(Error::NonFinite("model parameter".into()));
        }
        m.params = params;
        Ok(m)
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn output_dim(&self) -> usize {
        self.layers.last().map_or(0, |l| l.hidden)
    }

    pub fn layer_sizes(&self) -> Vec<usize> {
        self.layers.iter().map(|l| l.hidden).collect()
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [f64] {
        &mut self.params
    }

    pub fn num_params(&self) -> usize {
        self.params.len()
    }

    /// Flat indices of the weights and bias of `gate` in every layer.
    pub fn gate_param_indices(&self, gate: Gate) -> Vec<usize> {
        let g = gate as usize;
        let mut out = Vec::new();
        for l in &self.layers {
            let cols = l.cols();
            let rows = g * l.hidden..(g + 1) * l.hidden;
            for r in rows.clone() {
                out.extend(l.w_off + r * cols..l.w_off + (r + 1) * cols);
            }
            out.extend(rows.map(|r| l.b_off + r));
        }
        out
    }

    fn check_seq(&self, seq: &[f64]) -> Result<usize> {
        if seq.is_empty() || !seq.len().is_multiple_of(self.input_dim) {
            return Err(Error::ShapeMismatch {
                expected: self.input_dim,
                actual: seq.len(),
            });
        }
        Ok(seq.len() / self.input_dim)
    }

    fn run(&self, seq: &[f64], keep_cache: bool) -> (Vec<f64>, Vec<LayerCache>) {
        let steps = seq.len() / self.input_dim;
        let mut inputs: Vec<Vec<f64>> = seq.chunks(self.input_dim).map(<[f64]>::to_vec).collect();
        let mut caches = Vec::with_capacity(if keep_cache { self.layers.len() } else { 0 });
        for l in &self.layers {
            let (h_dim, cols) = (l.hidden, l.cols());
            let w = &self.params[l.w_off..l.b_off];
            let b = &self.params[l.b_off..l.b_off + 4 * h_dim];
            let mut h = vec![0.0; h_dim];
            let mut c = vec![0.0; h_dim];
            let mut outputs = Vec::with_capacity(steps);
            let mut cache = LayerCache {
                steps: Vec::with_capacity(if keep_cache { steps } else { 0 }),
            };
            for x in &inputs {
                let mut xh = Vec::with_capacity(cols);
                xh.extend_from_slice(x);
                xh.extend_from_slice(&h);
                let mut gates = b.to_vec();
                for (r, gate) in gates.iter_mut().enumerate() {
                    let row = &w[r * cols..(r + 1) * cols];
                    *gate += row.iter().zip(&xh).map(|(a, v)| a * v).sum::<f64>();
                }
                for (k, gate) in gates.iter_mut().enumerate() {
                    *gate = if k < 3 * h_dim { sigmoid(*gate) } else { gate.tanh() };
                }
                let c_prev = std::mem::take(&mut c);
                c = (0..h_dim)
                    .map(|j| gates[h_dim + j] * c_prev[j] + gates[j] * gates[3 * h_dim + j])
                    .collect();
                let tanh_c: Vec<f64> = c.iter().map(|v| v.tanh()).collect();
                h = (0..h_dim).map(|j| gates[2 * h_dim + j] * tanh_c[j]).collect();
                outputs.push(h.clone());
                if keep_cache {
                    cache.steps.push(StepCache {
                        xh,
                        c_prev,
                        gates,
                        tanh_c,
                    });
                }
            }
            if keep_cache {
                caches.push(cache);
            }
            inputs = outputs;
        }
        (inputs.pop().unwrap_or_default(), caches)
    }

    /// Final-layer hidden state after consuming `seq` (flattened, oldest
    /// step first).
    pub fn forward(&self, seq: &[f64]) -> Result<Vec<f64>> {
        self.check_seq(seq)?;
        Ok(self.run(seq, false).0)
    }

    /// Per-sample loss `mean_j (y_j − target_j)²` and its gradient with
    /// respect to every parameter.
    pub fn loss_and_gradient(&self, seq: &[f64], target: &[f64]) -> Result<(f64, Vec<f64>)> {
        self.backprop(seq, target, None)
    }

    /// Like [`loss_and_gradient`](Self::loss_and_gradient), but with the
    /// gradient through `zeroed` forced to zero. Only useful for
    /// validating gradient checks.
    pub fn loss_and_gradient_mutated(&self, seq: &[f64], target: &[f64], zeroed: Gate) -> Result<(f64, Vec<f64>)> {
        self.backprop(seq, target, Some(zeroed))
    }

    pub fn loss(&self, seq: &[f64], target: &[f64]) -> Result<f64> {
        let y = self.forward(seq)?;
        self.check_target(target)?;
        Ok(mse(&y, target))
    }

    fn check_target(&self, target: &[f64]) -> Result<()> {
        if target.len() != self.output_dim() {
            return Err(Error::ShapeMismatch {
                expected: self.output_dim(),
                actual: target.len(),
            });
        }
        Ok(())
    }

    fn backprop(&self, seq: &[f64], target: &[f64], zeroed: Option<Gate>) -> Result<(f64, Vec<f64>)> {
        let steps = self.check_seq(seq)?;
        self.check_target(target)?;
        let (y, caches) = self.run(seq, true);
        let loss = mse(&y, target);
        let scale = 2.0 / y.len() as f64;

        let mut grad = vec![0.0; self.params.len()];
        // Gradient w.r.t. the hidden output of the current layer at each step.
        let mut dh_ext: Vec<Vec<f64>> = vec![Vec::new(); steps];
        dh_ext[steps - 1] = y.iter().zip(target).map(|(a, b)| scale * (a - b)).collect();

        for (li, l) in self.layers.iter().enumerate().rev() {
            let (h_dim, cols) = (l.hidden, l.cols());
            let w = &self.params[l.w_off..l.b_off];
            let cache = &caches[li];
            let mut dh_next = vec![0.0; h_dim];
            let mut dc_next = vec![0.0; h_dim];
            let mut dx_lower: Vec<Vec<f64>> = vec![vec![0.0; l.input]; steps];
            let mut da = vec![0.0; 4 * h_dim];

            for t in (0..steps).rev() {
                let s = &cache.steps[t];
                let (gi, gf, go, gg) = (
                    &s.gates[..h_dim],
                    &s.gates[h_dim..2 * h_dim],
                    &s.gates[2 * h_dim..3 * h_dim],
                    &s.gates[3 * h_dim..],
                );
                for j in 0..h_dim {
                    let dh = dh_next[j] + dh_ext[t].get(j).copied().unwrap_or(0.0);
                    let d_o = dh * s.tanh_c[j];
                    let dc = dh * go[j] * (1.0 - s.tanh_c[j] * s.tanh_c[j]) + dc_next[j];
                    let d_i = dc * gg[j];
                    let d_g = dc * gi[j];
                    let d_f = dc * s.c_prev[j];
                    dc_next[j] = dc * gf[j];
                    da[j] = d_i * gi[j] * (1.0 - gi[j]);
                    da[h_dim + j] = d_f * gf[j] * (1.0 - gf[j]);
                    da[2 * h_dim + j] = d_o * go[j] * (1.0 - go[j]);
                    da[3 * h_dim + j] = d_g * (1.0 - gg[j] * gg[j]);
                }
                if let Some(gate) = zeroed {
                    let g = gate as usize;
                    da[g * h_dim..(g + 1) * h_dim].fill(0.0);
                }
                let mut dxh = vec![0.0; cols];
                for (r, &dar) in da.iter().enumerate() {
                    if dar == 0.0 {
                        continue;
                    }
                    let row = &w[r * cols..(r + 1) * cols];
                    let grow = &mut grad[l.w_off + r * cols..l.w_off + (r + 1) * cols];
                    for k in 0..cols {
                        grow[k] += dar * s.xh[k];
                        dxh[k] += dar * row[k];
                    }
                    grad[l.b_off + r] += dar;
                }
                dx_lower[t].copy_from_slice(&dxh[..l.input]);
                dh_next.copy_from_slice(&dxh[l.input..]);
            }
            dh_ext = dx_lower;
        }
        Ok((loss, grad))
    }
}

pub(crate) fn mse(y: &[f64], target: &[f64]) -> f64 {
    y.iter().zip(target).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() / y.len() as f64
}
