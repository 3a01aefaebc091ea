//! Bin timestamped contact events into snapshots and carve out a temporal split.
//!
//! cargo run --example ingest_contact_events -- [events.txt] [bins]
//!
//! Without arguments a small built-in contact log is used. Lines are
//! `time node node`, blank lines and `#` comments are ignored.

use std::fs::File;

use kinemb::ingest::{bin_snapshots, parse_edge_events, temporal_split, EventFormat, SplitSpec};

const SAMPLE: &str = "\
# time a b
20 1 2
40 1 3
60 2 3
80 3 4
100 4 5
120 1 5
140 2 4
160 5 6
180 1 6
200 3 6
";

fn main() -> kinemb::Result<()> {
    let mut args = std::env::args().skip(1);
    let path = args.next();
    let bins: usize = args.next().and_then(|b| b.parse().ok()).unwrap_or(5);
    let events = match &path {
        Some(p) => parse_edge_events(File::open(p).map_err(|e| kinemb::Error::io(p, e))?, EventFormat::Triple)?,
        None => parse_edge_events(SAMPLE.as_bytes(), EventFormat::Triple)?,
    };
    let g = bin_snapshots(&events, bins, 0.0)?;
    println!(
        "{} events -> {} nodes in {} snapshots",
        events.len(),
        g.num_nodes(),
        g.num_snapshots()
    );
    for (i, c) in g.edge_counts().iter().enumerate() {
        println!("  snapshot {i}: {c} edges");
    }

    let (train, target) = temporal_split(&g, &SplitSpec::default())?;
    println!(
        "3:1 split: {} training snapshots, target snapshot {} with {} edges",
        train.num_snapshots(),
        target.index(),
        target.num_edges()
    );
    Ok(())
}
