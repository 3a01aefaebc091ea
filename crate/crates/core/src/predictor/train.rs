use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::lstm::RecurrentModel;
use crate::error::{Error, Result};
use crate::graph::NodeId;
use crate::kinematics::VelocitySequence;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub epochs: usize,
    pub step_size: f64,
    pub batch: usize,
    pub gradient_clip: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            epochs: 200,
            step_size: 1e-3,
            batch: 64,
            gradient_clip: 5.0,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.epochs == 0 {
            return Err(Error::InvalidArgument("epochs must be at least 1".into()));
        }
        if !(self.step_size > 0.0 && self.step_size.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "step size must be positive, got {}",
                self.step_size
            )));
        }
        if self.batch == 0 {
            return Err(Error::InvalidArgument("batch must be at least 1".into()));
        }
        if !(self.gradient_clip > 0.0) {
            return Err(Error::InvalidArgument("gradient clip must be positive".into()));
        }
        Ok(())
    }
}

/// `input_window` consecutive velocities and the one that followed.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainingWindow {
    pub inputs: Vec<f64>,
    pub target: Vec<f64>,
}

/// Every sliding window of every node's velocity history.
pub fn sliding_windows(vels: &VelocitySequence, input_window: usize) -> Result<Vec<TrainingWindow>> {
    if input_window == 0 {
        return Err(Error::InvalidArgument("input window must be at least 1".into()));
    }
    if vels.steps() < input_window + 1 {
        return Err(Error::InsufficientHistory(format!(
            "training needs sequences of at least {} velocities (window {input_window} plus target), got {}",
            input_window + 1,
            vels.steps()
        )));
    }
    let d = vels.dim();
    let mut out = Vec::with_capacity(vels.num_nodes() * (vels.steps() - input_window));
    for p in (0..vels.num_nodes()).map(NodeId::from) {
        let hist = vels.history(p);
        for start in 0..vels.steps() - input_window {
            out.push(TrainingWindow {
                inputs: hist[start * d..(start + input_window) * d].to_vec(),
                target: hist[(start + input_window) * d..(start + input_window + 1) * d].to_vec(),
            });
        }
    }
    Ok(out)
}

/// Per-dimension z-scoring of velocities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

impl Standardizer {
    /// Statistics over every velocity vector in `vels`.
    pub fn fit(vels: &VelocitySequence) -> Self {
        let d = vels.dim();
        let mut mean = vec![0.0; d];
        let mut count = 0usize;
        for p in (0..vels.num_nodes()).map(NodeId::from) {
            for v in vels.history(p).chunks(d) {
                for (m, x) in mean.iter_mut().zip(v) {
                    *m += x;
                }
                count += 1;
            }
        }
        let count = count.max(1) as f64;
        mean.iter_mut().for_each(|m| *m /= count);
        let mut var = vec![0.0; d];
        for p in (0..vels.num_nodes()).map(NodeId::from) {
            for v in vels.history(p).chunks(d) {
                for ((s, x), m) in var.iter_mut().zip(v).zip(&mean) {
                    *s += (x - m) * (x - m);
                }
            }
        }
        let std = var
            .into_iter()
            .map(|s| {
                let sd = (s / count).sqrt();
                if sd > 1e-12 {
                    sd
                } else {
                    1.0
                }
            })
            .collect();
        Standardizer { mean, std }
    }

    pub fn identity(d: usize) -> Self {
        Standardizer {
            mean: vec![0.0; d],
            std: vec![1.0; d],
        }
    }

    /// Standardize a flattened run of velocity vectors.
    pub fn forward(&self, flat: &[f64]) -> Vec<f64> {
        let d = self.mean.len();
        flat.iter()
            .enumerate()
            .map(|(k, x)| (x - self.mean[k % d]) / self.std[k % d])
            .collect()
    }

    pub fn inverse(&self, z: &[f64]) -> Vec<f64> {
        z.iter()
            .zip(self.mean.iter().zip(&self.std))
            .map(|(z, (m, s))| z * s + m)
            .collect()
    }
}

/// Adaptive-moment optimizer state.
struct Adam {
    m: Vec<f64>,
    v: Vec<f64>,
    t: i32,
}

impl Adam {
    fn new(n: usize) -> Self {
        Adam {
            m: vec![0.0; n],
            v: vec![0.0; n],
            t: 0,
        }
    }

    fn step(&mut self, params: &mut [f64], grad: &[f64], cfg: &TrainConfig) {
        self.t += 1;
        let bc1 = 1.0 - cfg.beta1.powi(self.t);
        let bc2 = 1.0 - cfg.beta2.powi(self.t);
        for k in 0..params.len() {
            let g = grad[k];
            self.m[k] = cfg.beta1 * self.m[k] + (1.0 - cfg.beta1) * g;
            self.v[k] = cfg.beta2 * self.v[k] + (1.0 - cfg.beta2) * g * g;
            let m_hat = self.m[k] / bc1;
            let v_hat = self.v[k] / bc2;
            params[k] -= cfg.step_size * m_hat / (v_hat.sqrt() + cfg.epsilon);
        }
    }
}

/// Minimize per-window next-step squared error by mini-batch Adam.
///
/// `windows` are used as given (standardize beforehand if needed). Returns
/// the mean training loss of each epoch. The shuffling order derives from
/// `seed`; batch gradients are reduced in window order so results do not
/// depend on the number of worker threads.
pub fn train(model: &mut RecurrentModel, windows: &[TrainingWindow], cfg: &TrainConfig, seed: u64) -> Result<Vec<f64>> {
    cfg.validate()?;
    if windows.is_empty() {
        return Err(Error::InvalidArgument("empty training dataset".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..windows.len()).collect();
    let mut adam = Adam::new(model.num_params());
    let mut trace = Vec::with_capacity(cfg.epochs);

    for epoch in 0..cfg.epochs {
        order.shuffle(&mut rng);
        let mut epoch_loss = 0.0;
        for batch in order.chunks(cfg.batch) {
            let results: Vec<(f64, Vec<f64>)> = batch
                .par_iter()
                .map(|&k| model.loss_and_gradient(&windows[k].inputs, &windows[k].target))
                .collect::<Result<_>>()?;
            let mut grad = vec![0.0; model.num_params()];
            let mut batch_loss = 0.0;
            for (loss, g) in &results {
                batch_loss += loss;
                for (a, b) in grad.iter_mut().zip(g) {
                    *a += b;
                }
            }
            if !batch_loss.is_finite() {
                return Err(Error::NonFinite(format!(
                    "training loss became {batch_loss} in epoch {epoch}"
                )));
            }
            epoch_loss += batch_loss;
            let inv = 1.0 / batch.len() as f64;
            grad.iter_mut().for_each(|g| *g *= inv);
            let norm = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
            if norm > cfg.gradient_clip {
                let s = cfg.gradient_clip / norm;
                grad.iter_mut().for_each(|g| *g *= s);
            }
            adam.step(model.params_mut(), &grad, cfg);
        }
        trace.push(epoch_loss / windows.len() as f64);
    }
    if model.params().iter().any(|p| !p.is_finite()) {
        return Err(Error::NonFinite("model parameters after training".into()));
    }
    Ok(trace)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn constant_windows(v: &[f64], count: usize, window: usize) -> Vec<TrainingWindow> {
        (0..count)
            .map(|_| TrainingWindow {
                inputs: v.repeat(window),
                target: v.to_vec(),
            })
            .collect()
    }

    #[test]
    fn constant_target_is_learned() {
        let windows = constant_windows(&[0.5, -0.3], 64, 3);
        let mut model = RecurrentModel::init(2, &[8, 2], 4).unwrap();
        let cfg = TrainConfig {
            epochs: 200,
            batch: 16,
            step_size: 1e-2,
            ..TrainConfig::default()
        };
        let trace = train(&mut model, &windows, &cfg, 1).unwrap();
        let initial = model_loss_at_init(&windows);
        assert!(
            *trace.last().unwrap() < 0.1 * initial,
            "{initial} -> {:?}",
            trace.last()
        );
    }

    fn model_loss_at_init(windows: &[TrainingWindow]) -> f64 {
        let m = RecurrentModel::init(2, &[8, 2], 4).unwrap();
        windows
            .iter()
            .map(|w| m.loss(&w.inputs, &w.target).unwrap())
            .sum::<f64>()
            / windows.len() as f64
    }

    #[test]
    fn zero_data_stays_at_zero_loss() {
        let windows = constant_windows(&[0.0, 0.0, 0.0], 10, 2);
        let mut model = RecurrentModel::init(3, &[4, 3], 2).unwrap();
        let before = model.clone();
        let cfg = TrainConfig {
            epochs: 5,
            ..TrainConfig::default()
        };
        let trace = train(&mut model, &windows, &cfg, 0).unwrap();
        assert!(trace.iter().all(|&l| l == 0.0));
        assert_eq!(model, before);
    }

    #[test]
    fn empty_dataset_rejected() {
        let mut model = RecurrentModel::init(2, &[2], 0).unwrap();
        assert!(train(&mut model, &[], &TrainConfig::default(), 0).is_err());
    }

    #[test]
    fn standardizer_round_trip() {
        let vels = VelocitySequence::from_vec(2, 2, 2, vec![1.0, 10.0, 3.0, 10.0, 5.0, 10.0, 7.0, 10.0]).unwrap();
        let s = Standardizer::fit(&vels);
        assert_eq!(s.mean, vec![4.0, 10.0]);
        assert_eq!(s.std[1], 1.0);
        let z = s.forward(&[4.0, 10.0]);
        assert_eq!(z, vec![0.0, 0.0]);
        let back = s.inverse(&s.forward(&[2.5, 11.0]));
        assert!((back[0] - 2.5).abs() < 1e-12 && (back[1] - 11.0).abs() < 1e-12);
    }
}
