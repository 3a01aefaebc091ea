//! Sweep the velocity history length over the drift graph and print the
//! long-format results table.
//!
//! cargo run --release --example hyperparameter_sweep -- [history|dim|series_length] [values]

use kinemb::experiment::{run_sweep, write_sweep_csv, RunConfig, SweepParameter, SweepSpec};
use kinemb::predictor::TrainConfig;
use kinemb::synthetic::{drift_graph, DriftConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let parameter: SweepParameter = args.next().as_deref().unwrap_or("history").parse()?;
    let values = kinemb::cli::parse_values(args.next().as_deref().unwrap_or("2..6"))?;

    let g = drift_graph(&DriftConfig::default())?;
    let base = RunConfig {
        layers: vec![16],
        // Fixed so that every h up to the series length stays trainable.
        input_window: Some(2),
        train: TrainConfig {
            epochs: 50,
            ..TrainConfig::default()
        },
        ..RunConfig::default()
    };
    let spec = SweepSpec {
        parameter,
        values,
        repeats: 2,
        base,
    };
    let records = run_sweep(&g, &spec)?;
    write_sweep_csv(&records, std::io::stdout())?;
    Ok(())
}
