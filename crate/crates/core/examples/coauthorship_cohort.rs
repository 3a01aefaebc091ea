//! Yearly co-authorship snapshots, a cohort subgraph and balanced evaluation pairs.
//!
//! cargo run --example coauthorship_cohort

use std::collections::BTreeSet;

use kinemb::ingest::{bin_snapshots, parse_edge_events, sample_labeled_pairs, EventFormat, SplitSpec};

const PAPERS: &str = "\
paper_id,year,authors
p1,2015,ada;bo;cy
p2,2015,dee;eve
p3,2016,ada;dee
p4,2016,bo;cy;fay
p5,2017,eve;fay
p6,2017,ada;bo
p7,2018,cy;dee;eve
p8,2019,ada;fay;gus
p9,2019,bo;gus
p10,2020,ada;eve;gus
p11,2020,cy;fay
";

fn main() -> kinemb::Result<()> {
    let events = parse_edge_events(PAPERS.as_bytes(), EventFormat::CoauthorshipCsv)?;
    // One snapshot per calendar year.
    let g = bin_snapshots(&events, 6, 0.0)?;
    for s in g.snapshots() {
        let names: Vec<String> = s
            .edges()
            .iter()
            .map(|&(u, v)| format!("{}-{}", g.registry().label(u).unwrap(), g.registry().label(v).unwrap()))
            .collect();
        println!("{}: {}", 2015 + s.index(), names.join(" "));
    }

    let cohort: BTreeSet<_> = ["ada", "bo", "cy", "eve", "fay", "gus"]
        .iter()
        .filter_map(|l| g.registry().id(l))
        .collect();
    let sub = g.induced_subgraph(&cohort)?;
    println!(
        "cohort of {} authors, edges per year {:?}",
        sub.num_nodes(),
        sub.edge_counts()
    );

    let target = SplitSpec::PerYearHoldout { test_timestep: 5 }.target_index(sub.num_snapshots())?;
    let pairs = sample_labeled_pairs(&sub, sub.snapshot(target)?, &sub.registry().ids().collect(), 11)?;
    for p in &pairs.pairs {
        println!(
            "  {:>2} {}-{}",
            p.label.as_i8(),
            sub.registry().label(p.u).unwrap(),
            sub.registry().label(p.v).unwrap()
        );
    }
    Ok(())
}
