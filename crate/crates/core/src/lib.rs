//! Temporal link prediction from node velocities in an embedding space.
//!
//! A dynamic graph is a sequence of snapshots over a fixed node set. Each
//! snapshot is embedded into `R^d`, consecutive positions give per-node
//! velocities, a forecaster predicts the next velocity, and the predicted
//! locations (smoothed over recent velocities and one-hop neighborhoods)
//! are compared pairwise to score candidate links.
//!
//! ```no_run
//! use kinemb::experiment::{run_experiment, RunConfig};
//! use kinemb::synthetic::{drift_graph, DriftConfig};
//!
//! let g = drift_graph(&DriftConfig::default()).unwrap();
//! let report = run_experiment(&g, &RunConfig::default()).unwrap();
//! println!("AUROC {:.4}", report.auroc);
//! ```

pub mod cli;
pub mod embedding;
pub mod error;
pub mod experiment;
pub mod graph;
pub mod ingest;
pub mod kinematics;
pub mod metrics;
pub mod predictor;
pub mod scoring;
pub mod synthetic;

pub use error::{Error, Result};
pub use graph::{NodeId, NodeRegistry, Snapshot, TemporalGraph};
