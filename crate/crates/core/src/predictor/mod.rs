//! Next-velocity forecasters.
//!
//! The recurrent predictor is one LSTM stack shared by all nodes, trained on
//! sliding windows of standardized velocities. Three closed-form baselines
//! (persistence, linear extrapolation, exponential smoothing) share the same
//! interface.

mod checkpoint;
mod gradcheck;
mod lstm;
mod train;

use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::NodeId;
use crate::kinematics::VelocitySequence;

pub use checkpoint::{load_checkpoint, read_checkpoint_file, save_checkpoint, write_checkpoint_file};
pub use gradcheck::{gradient_check, gradient_check_mutated, GRADCHECK_STEP};
pub use lstm::{Gate, RecurrentModel};
pub use train::{sliding_windows, train, Standardizer, TrainConfig, TrainingWindow};

/// Decay of the exponential-smoothing baseline.
pub const EMA_DECAY: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PredictorKind {
    Recurrent,
    Persistence,
    LinearExtrapolation,
    ExponentialSmoothing,
}

impl FromStr for PredictorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "recurrent" | "lstm" => Ok(PredictorKind::Recurrent),
            "persistence" => Ok(PredictorKind::Persistence),
            "linear-extrapolation" | "linear" => Ok(PredictorKind::LinearExtrapolation),
            "exponential-smoothing" | "ema" => Ok(PredictorKind::ExponentialSmoothing),
            other => Err(Error::InvalidArgument(format!("unknown predictor {other:?}"))),
        }
    }
}

impl PredictorKind {
    pub fn as_str(self) -> &'static str {
        match self {
            PredictorKind::Recurrent => "recurrent",
            PredictorKind::Persistence => "persistence",
            PredictorKind::LinearExtrapolation => "linear-extrapolation",
            PredictorKind::ExponentialSmoothing => "exponential-smoothing",
        }
    }
}

/// Layer widths used when none are configured; the output layer (width `d`)
/// is appended automatically.
pub const DEFAULT_HIDDEN: [usize; 2] = [64, 32];
/// The widths of the original large configuration.
pub const PAPER_HIDDEN: [usize; 2] = [512, 256];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictorSpec {
    pub kind: PredictorKind,
    /// Hidden widths before the output layer.
    pub hidden_layers: Vec<usize>,
    pub input_window: usize,
    pub seed: u64,
}

impl Default for PredictorSpec {
    fn default() -> Self {
        PredictorSpec {
            kind: PredictorKind::Recurrent,
            hidden_layers: DEFAULT_HIDDEN.to_vec(),
            input_window: 3,
            seed: 0,
        }
    }
}

impl PredictorSpec {
    /// Full layer stack for embedding dimension `d`.
    pub fn layer_sizes(&self, d: usize) -> Vec<usize> {
        let mut sizes = self.hidden_layers.clone();
        sizes.push(d);
        sizes
    }

    pub fn validate(&self) -> Result<()> {
        if self.input_window < 2 {
            return Err(Error::InvalidArgument(format!(
                "predictor input window must be at least 2, got {}",
                self.input_window
            )));
        }
        if self.hidden_layers.contains(&0) {
            return Err(Error::InvalidArgument("hidden layer widths must be positive".into()));
        }
        Ok(())
    }
}

/// Trained LSTM together with its velocity scaling.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainedRecurrent {
    pub model: RecurrentModel,
    pub standardizer: Standardizer,
    pub input_window: usize,
    pub seed: u64,
    pub loss_trace: Vec<f64>,
}

impl TrainedRecurrent {
    /// Forecast from a flattened window of raw (unstandardized) velocities.
    pub fn predict(&self, window: &[f64]) -> Result<Vec<f64>> {
        let z = self.model.forward(&self.standardizer.forward(window))?;
        Ok(self.standardizer.inverse(&z))
    }
}

/// A predictor ready to forecast.
#[derive(Debug, Clone, PartialEq)]
pub enum Predictor {
    Recurrent(Box<TrainedRecurrent>),
    Persistence,
    LinearExtrapolation,
    ExponentialSmoothing { window: usize },
}

impl Predictor {
    /// Number of trailing velocities consumed per forecast.
    pub fn window(&self) -> usize {
        match self {
            Predictor::Recurrent(r) => r.input_window,
            Predictor::Persistence => 1,
            Predictor::LinearExtrapolation => 2,
            Predictor::ExponentialSmoothing { window } => *window,
        }
    }

    pub fn recurrent(&self) -> Option<&TrainedRecurrent> {
        match self {
            Predictor::Recurrent(r) => Some(r),
            _ => None,
        }
    }

    /// Forecast from `window` trailing velocities, oldest first.
    pub fn predict(&self, window: &[&[f64]]) -> Result<Vec<f64>> {
        let Some(last) = window.last() else {
            return Err(Error::InsufficientHistory("empty velocity window".into()));
        };
        if window.len() < self.window() {
            return Err(Error::InsufficientHistory(format!(
                "predictor needs {} trailing velocities, got {}",
                self.window(),
                window.len()
            )));
        }
        let window = &window[window.len() - self.window()..];
        match self {
            Predictor::Recurrent(r) => r.predict(&window.concat()),
            Predictor::Persistence => Ok(last.to_vec()),
            Predictor::LinearExtrapolation => {
                let prev = window[0];
                Ok(last.iter().zip(prev).map(|(a, b)| 2.0 * a - b).collect())
            }
            Predictor::ExponentialSmoothing { .. } => {
                let n = window.len();
                let weights: Vec<f64> = (0..n).map(|k| EMA_DECAY.powi((n - 1 - k) as i32)).collect();
                let total: f64 = weights.iter().sum();
                let mut out = vec![0.0; last.len()];
                for (v, w) in window.iter().zip(&weights) {
                    for (o, x) in out.iter_mut().zip(v.iter()) {
                        *o += w / total * x;
                    }
                }
                Ok(out)
            }
        }
    }
}

/// Build the predictor described by `spec`, training it on `vels` when recurrent.
pub fn fit_predictor(spec: &PredictorSpec, vels: &VelocitySequence, cfg: &TrainConfig) -> Result<Predictor> {
    spec.validate()?;
    match spec.kind {
        PredictorKind::Persistence => Ok(Predictor::Persistence),
        PredictorKind::LinearExtrapolation => Ok(Predictor::LinearExtrapolation),
        PredictorKind::ExponentialSmoothing => Ok(Predictor::ExponentialSmoothing {
            window: spec.input_window,
        }),
        PredictorKind::Recurrent => {
            let standardizer = Standardizer::fit(vels);
            let windows: Vec<TrainingWindow> = sliding_windows(vels, spec.input_window)?
                .into_iter()
                .map(|w| TrainingWindow {
                    inputs: standardizer.forward(&w.inputs),
                    target: standardizer.forward(&w.target),
                })
                .collect();
            let mut model = RecurrentModel::init(vels.dim(), &spec.layer_sizes(vels.dim()), spec.seed)?;
            let loss_trace = train(&mut model, &windows, cfg, spec.seed)?;
            Ok(Predictor::Recurrent(Box::new(TrainedRecurrent {
                model,
                standardizer,
                input_window: spec.input_window,
                seed: spec.seed,
                loss_trace,
            })))
        }
    }
}

/// Forecast `Vel^{t+1}` for every node from its trailing velocities.
pub fn predict_all(predictor: &Predictor, vels: &VelocitySequence) -> Result<Vec<Vec<f64>>> {
    let window = predictor.window();
    if vels.steps() < window {
        return Err(Error::InsufficientHistory(format!(
            "predictor needs {window} velocities per node, only {} observed",
            vels.steps()
        )));
    }
    (0..vels.num_nodes())
        .map(|p| {
            let trailing = vels.trailing(NodeId::from(p), window)?;
            predictor.predict(&trailing)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn persistence_returns_last() {
        assert_eq!(
            Predictor::Persistence.predict(&[&[0.0, 0.0], &[3.0, -1.0]]).unwrap(),
            vec![3.0, -1.0]
        );
    }

    #[test]
    fn linear_extrapolation() {
        assert_eq!(
            Predictor::LinearExtrapolation
                .predict(&[&[1.0, 0.0], &[2.0, 0.0]])
                .unwrap(),
            vec![3.0, 0.0]
        );
    }

    #[test]
    fn ema_two_steps() {
        let p = Predictor::ExponentialSmoothing { window: 2 };
        let out = p.predict(&[&[0.0, 0.0], &[1.0, 1.0]]).unwrap();
        assert!((out[0] - 2.0 / 3.0).abs() < 1e-15 && (out[1] - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn insufficient_window() {
        assert!(Predictor::LinearExtrapolation.predict(&[&[1.0]]).is_err());
        let vels = VelocitySequence::from_vec(1, 1, 1, vec![1.0]).unwrap();
        assert!(predict_all(&Predictor::LinearExtrapolation, &vels).is_err());
    }
}
