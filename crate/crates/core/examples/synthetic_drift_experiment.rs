//! Two drifting communities: compare the velocity pipeline against scoring
//! the last embedded positions directly.
//!
//! cargo run --example synthetic_drift_experiment -- [seed]

use kinemb::experiment::{run_experiment, RunConfig};
use kinemb::synthetic::{drift_graph, DriftConfig};

fn main() -> kinemb::Result<()> {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(0);
    let g = drift_graph(&DriftConfig {
        seed,
        ..DriftConfig::default()
    })?;
    println!("edges per snapshot: {:?}", g.edge_counts());

    let report = run_experiment(&g, &RunConfig::default())?;
    println!(
        "target snapshot {}  ({} positives, {} negatives)",
        report.target_timestep, report.n_pos, report.n_neg
    );
    println!(
        "velocity pipeline  AUROC {:.4}  AUPRC {:.4}",
        report.auroc, report.auprc
    );
    println!(
        "raw final position AUROC {:.4}  AUPRC {:.4}",
        report.baseline.auroc, report.baseline.auprc
    );
    Ok(())
}
