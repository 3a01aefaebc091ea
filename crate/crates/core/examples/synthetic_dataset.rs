//! Write the two-community drift graph as a `time u v` event file.
//!
//! cargo run --example synthetic_dataset -- data/synthetic_drift.txt [seed]

use std::fs::File;
use std::io::BufWriter;

use kinemb::ingest::write_triples;
use kinemb::synthetic::{drift_graph, graph_events, DriftConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let path = args.next().unwrap_or_else(|| "synthetic_drift.txt".into());
    let seed = args.next().map(|s| s.parse()).transpose()?.unwrap_or(0);
    let g = drift_graph(&DriftConfig {
        seed,
        ..DriftConfig::default()
    })?;
    let events = graph_events(&g);
    write_triples(&events, BufWriter::new(File::create(&path)?))?;
    println!("{} events over {} snapshots -> {path}", events.len(), g.num_snapshots());
    Ok(())
}
