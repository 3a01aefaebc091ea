//! Train the recurrent velocity forecaster, checkpoint it and compare it with
//! the closed-form baselines on held-out next steps.
//!
//! cargo run --release --example train_velocity_lstm

use kinemb::embedding::{embed_aligned, AlignedEmbedderConfig};
use kinemb::graph::NodeId;
use kinemb::kinematics::{compute_velocities, VelocitySequence};
use kinemb::predictor::{
    fit_predictor, load_checkpoint, save_checkpoint, Predictor, PredictorKind, PredictorSpec, TrainConfig,
};
use kinemb::synthetic::{drift_graph, DriftConfig};

/// Mean squared error forecasting each node's last velocity from the ones before it.
fn holdout_error(p: &Predictor, vels: &VelocitySequence) -> kinemb::Result<f64> {
    let d = vels.dim();
    let w = p.window();
    let mut total = 0.0;
    for node in (0..vels.num_nodes()).map(NodeId::from) {
        let hist: Vec<&[f64]> = vels.history(node).chunks(d).collect();
        let (inputs, target) = (&hist[hist.len() - 1 - w..hist.len() - 1], hist[hist.len() - 1]);
        let f = p.predict(inputs)?;
        total += f.iter().zip(target).map(|(a, b)| (a - b).powi(2)).sum::<f64>() / d as f64;
    }
    Ok(total / vels.num_nodes() as f64)
}

fn main() -> kinemb::Result<()> {
    let g = drift_graph(&DriftConfig::default())?;
    let e = embed_aligned(
        &g.window(0..8)?,
        &AlignedEmbedderConfig {
            dim: 8,
            ..Default::default()
        },
    )?;
    let vels = compute_velocities(&e)?;
    // Train on all but the last velocity of every node.
    let train = VelocitySequence::from_vec(
        vels.num_nodes(),
        vels.steps() - 1,
        vels.dim(),
        (0..vels.num_nodes())
            .flat_map(|p| {
                let h = vels.history(NodeId::from(p));
                h[..h.len() - vels.dim()].to_vec()
            })
            .collect(),
    )?;

    let spec = PredictorSpec {
        kind: PredictorKind::Recurrent,
        hidden_layers: vec![32, 16],
        input_window: 3,
        seed: 5,
    };
    let cfg = TrainConfig::default();
    let lstm = fit_predictor(&spec, &train, &cfg)?;
    let trace = &lstm.recurrent().unwrap().loss_trace;
    for epoch in [0, 9, 49, 99, 199] {
        println!("epoch {:>3}: loss {:.5}", epoch + 1, trace[epoch]);
    }

    let mut buf = Vec::new();
    save_checkpoint(lstm.recurrent().unwrap(), &mut buf)?;
    let restored = load_checkpoint(buf.as_slice())?;
    println!(
        "checkpoint: {} bytes, parameters identical: {}",
        buf.len(),
        restored.model == lstm.recurrent().unwrap().model
    );

    for (name, p) in [
        ("recurrent", lstm),
        ("persistence", Predictor::Persistence),
        ("linear", Predictor::LinearExtrapolation),
        ("smoothing", Predictor::ExponentialSmoothing { window: 3 }),
    ] {
        println!("{name:>12}: held-out MSE {:.6}", holdout_error(&p, &vels)?);
    }
    Ok(())
}
