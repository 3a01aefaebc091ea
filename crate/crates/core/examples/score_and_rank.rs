//! Score candidate pairs from predicted locations and list the strongest.
//!
//! cargo run --example score_and_rank

use kinemb::graph::{NodeId, NodeRegistry};
use kinemb::kinematics::{LocationSet, LocationStage};
use kinemb::scoring::{rank_candidates, score_pairs, write_scored_pairs};

fn main() -> kinemb::Result<()> {
    let registry = NodeRegistry::from_labels(["ana", "ben", "cai", "dov", "eli"])?;
    let locs = LocationSet::new(
        LocationStage::Agg,
        2,
        vec![0.0, 0.0, 0.3, 0.1, 2.0, 2.0, 2.2, 1.9, 5.0, -1.0],
    )?;
    let pairs: Vec<(NodeId, NodeId)> = (0..5u32)
        .flat_map(|u| (u + 1..5).map(move |v| (NodeId(u), NodeId(v))))
        .collect();
    let scored = score_pairs(&locs, &pairs)?;
    println!("top 3:");
    for s in rank_candidates(&scored, 3)? {
        println!(
            "  {} - {}  distance {:.3}  score {:.3}",
            registry.label(s.u).unwrap(),
            registry.label(s.v).unwrap(),
            s.distance,
            s.score
        );
    }
    println!("\nall pairs as CSV:");
    write_scored_pairs(&scored, &registry, std::io::stdout())
}
