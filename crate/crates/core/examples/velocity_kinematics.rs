//! Velocities, recency-weighted aggregation and neighborhood smoothing on a
//! three-node path whose middle node moves at constant speed.
//!
//! cargo run --example velocity_kinematics

use kinemb::embedding::EmbeddingSequence;
use kinemb::graph::{NodeId, NodeRegistry, TemporalGraph};
use kinemb::kinematics::{
    aggregate_neighborhood, aggregate_velocity, compute_velocities, init_locations, HistoryWindow,
};

fn main() -> kinemb::Result<()> {
    // Four timesteps in the plane; node b moves +1 along x each step.
    #[rustfmt::skip]
    let positions = vec![
        0.0, 0.0,  0.0, 1.0,  2.0, 0.0,
        0.0, 0.0,  1.0, 1.0,  2.0, 0.0,
        0.0, 0.0,  2.0, 1.0,  2.0, 0.0,
        0.0, 0.0,  3.0, 1.0,  2.0, 0.0,
    ];
    let e = EmbeddingSequence::from_vec(4, 3, 2, positions)?;
    let registry = NodeRegistry::from_labels(["a", "b", "c"])?;
    let path = vec![(NodeId(0), NodeId(1)), (NodeId(1), NodeId(2))];
    let g = TemporalGraph::new(registry, vec![path.clone(); 4])?;

    let vels = compute_velocities(&e)?;
    println!("velocities of b: {:?}", vels.history(NodeId(1)));

    for h in 2..=4 {
        println!("h = {h}: weights {:?}", HistoryWindow::new(h)?.weights());
    }

    let w = HistoryWindow::new(3)?;
    // Pretend a forecaster predicted one more unit step for b and rest for a, c.
    let forecasts = [vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 0.0]];
    let agg: Vec<Vec<f64>> = (0..3)
        .map(|p| aggregate_velocity(&vels, NodeId(p as u32), &forecasts[p], w))
        .collect::<kinemb::Result<_>>()?;
    let init = init_locations(&e, &agg)?;
    let smoothed = aggregate_neighborhood(&init, &g, 3)?;
    for p in 0..3 {
        let id = NodeId(p);
        println!(
            "{}: init {:?} -> neighborhood mean {:?}",
            g.registry().label(id).unwrap(),
            init.get(id).unwrap(),
            smoothed.get(id).unwrap()
        );
    }
    Ok(())
}
