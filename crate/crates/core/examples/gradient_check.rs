//! Compare backpropagated gradients with central finite differences, then
//! show that dropping one gate's gradient is caught.
//!
//! cargo run --example gradient_check

use kinemb::predictor::{gradient_check, gradient_check_mutated, Gate, RecurrentModel, TrainingWindow};

fn main() -> kinemb::Result<()> {
    let model = RecurrentModel::init(4, &[6, 5, 4], 2024)?;
    let sample = TrainingWindow {
        inputs: (0..12).map(|k| (k as f64 * 0.37).sin()).collect(),
        target: vec![0.2, -0.4, 0.1, 0.3],
    };
    println!("{} parameters", model.num_params());
    println!(
        "intact model: max relative error {:.2e}",
        gradient_check(&model, &sample)?
    );
    for gate in [Gate::Input, Gate::Forget, Gate::Output, Gate::Candidate] {
        println!(
            "{gate:?} gradient zeroed: {:.2e}",
            gradient_check_mutated(&model, &sample, gate)?
        );
    }
    Ok(())
}
