use super::lstm::{Gate, RecurrentModel};
use super::train::TrainingWindow;
use crate::error::Result;

/// Central-difference step.
pub const GRADCHECK_STEP: f64 = 1e-4;

/// Largest relative disagreement between the backpropagated gradient and
/// central finite differences, over every parameter:
/// `|g_a − g_n| / max(|g_a|, |g_n|, 1e-8)`.
pub fn gradient_check(model: &RecurrentModel, sample: &TrainingWindow) -> Result<f64> {
    let (_, analytic) = model.loss_and_gradient(&sample.inputs, &sample.target)?;
    compare(model, sample, &analytic)
}

/// [`gradient_check`] against a gradient with one gate's contribution zeroed.
pub fn gradient_check_mutated(model: &RecurrentModel, sample: &TrainingWindow, zeroed: Gate) -> Result<f64> {
    let (_, analytic) = model.loss_and_gradient_mutated(&sample.inputs, &sample.target, zeroed)?;
    compare(model, sample, &analytic)
}

fn compare(model: &RecurrentModel, sample: &TrainingWindow, analytic: &[f64]) -> Result<f64> {
    let mut probe = model.clone();
    let mut worst = 0.0f64;
    for (k, &ga) in analytic.iter().enumerate() {
        let original = probe.params()[k];
        probe.params_mut()[k] = original + GRADCHECK_STEP;
        let up = probe.loss(&sample.inputs, &sample.target)?;
        probe.params_mut()[k] = original - GRADCHECK_STEP;
        let down = probe.loss(&sample.inputs, &sample.target)?;
        probe.params_mut()[k] = original;
        let gn = (up - down) / (2.0 * GRADCHECK_STEP);
        let rel = (ga - gn).abs() / ga.abs().max(gn.abs()).max(1e-8);
        worst = worst.max(rel);
    }
    Ok(worst)
}
