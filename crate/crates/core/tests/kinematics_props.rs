use kinemb::embedding::EmbeddingSequence;
use kinemb::graph::{NodeId, NodeRegistry, TemporalGraph};
use kinemb::kinematics::{
    aggregate_neighborhood, aggregate_velocity, compute_velocities, init_locations, weighted_recent_sum, HistoryWindow,
    VelocitySequence,
};
use kinemb::predictor::{predict_all, Predictor};
use proptest::prelude::*;

fn arb_sequence() -> impl Strategy<Value = EmbeddingSequence> {
    (2usize..8, 1usize..7, 1usize..6).prop_flat_map(|(t, n, d)| {
        prop::collection::vec(-10.0f64..10.0, t * n * d)
            .prop_map(move |data| EmbeddingSequence::from_vec(t, n, d, data).unwrap())
    })
}

fn random_graph(n: usize, t: usize, bits: &[bool]) -> TemporalGraph {
    let reg = NodeRegistry::from_labels((0..n).map(|i| i.to_string())).unwrap();
    let mut k = 0;
    let lists = (0..t).map(|_| {
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                if bits[k % bits.len()] {
                    edges.push((NodeId::from(u), NodeId::from(v)));
                }
                k += 1;
            }
        }
        edges
    });
    TemporalGraph::new(reg, lists.collect::<Vec<_>>()).unwrap()
}

proptest! {
    #[test]
    fn velocities_match_diff_oracle(e in arb_sequence()) {
        let v = compute_velocities(&e).unwrap();
        for p in (0..e.num_nodes()).map(NodeId::from) {
            for tau in 1..e.num_timesteps() {
                let oracle: Vec<f64> = e.position(tau, p).iter().zip(e.position(tau - 1, p)).map(|(a, b)| a - b).collect();
                prop_assert_eq!(v.velocity(p, tau).to_vec(), oracle);
            }
        }
    }

    #[test]
    fn aggregation_is_linear(
        xs in prop::collection::vec(prop::collection::vec(-5.0f64..5.0, 3), 2..10),
        ys in prop::collection::vec(prop::collection::vec(-5.0f64..5.0, 3), 10),
        a in -3.0f64..3.0, b in -3.0f64..3.0,
    ) {
        let h = xs.len();
        let ys = &ys[..h];
        let mix: Vec<Vec<f64>> = xs.iter().zip(ys).map(|(x, y)| x.iter().zip(y).map(|(p, q)| a * p + b * q).collect()).collect();
        let agg = |w: &[Vec<f64>]| weighted_recent_sum(&w.iter().map(Vec::as_slice).collect::<Vec<_>>()).unwrap();
        let lhs = agg(&mix);
        let (ax, ay) = (agg(&xs), agg(ys));
        for k in 0..3 {
            prop_assert!((lhs[k] - (a * ax[k] + b * ay[k])).abs() < 1e-10);
        }
    }

    #[test]
    fn neighborhood_is_convex(
        e in arb_sequence(),
        bits in prop::collection::vec(any::<bool>(), 30),
    ) {
        let n = e.num_nodes();
        let g = random_graph(n, e.num_timesteps(), &bits);
        let zero = vec![vec![0.0; e.dim()]; n];
        let init = init_locations(&e, &zero).unwrap();
        let agg = aggregate_neighborhood(&init, &g, e.num_timesteps() - 1).unwrap();
        let snap = g.last_snapshot().unwrap();
        for p in (0..n).map(NodeId::from) {
            let mut group = snap.neighbors(p).unwrap().to_vec();
            group.push(p);
            for k in 0..e.dim() {
                let vals: Vec<f64> = group.iter().map(|&q| init.get(q).unwrap()[k]).collect();
                let lo = vals.iter().copied().fold(f64::INFINITY, f64::min);
                let hi = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                let x = agg.get(p).unwrap()[k];
                prop_assert!(x >= lo - 1e-12 && x <= hi + 1e-12);
            }
        }
    }

    #[test]
    fn chain_is_translation_equivariant(
        e in arb_sequence(),
        bits in prop::collection::vec(any::<bool>(), 30),
        shift in prop::collection::vec(-100.0f64..100.0, 6),
    ) {
        prop_assume!(e.num_timesteps() >= 3);
        let n = e.num_nodes();
        let g = random_graph(n, e.num_timesteps(), &bits);
        let offset = &shift[..e.dim()];
        let run = |e: &EmbeddingSequence| {
            let vels = compute_velocities(e).unwrap();
            let fc = predict_all(&Predictor::LinearExtrapolation, &vels).unwrap();
            let w = HistoryWindow::new(3).unwrap();
            let agg: Vec<Vec<f64>> = (0..n).map(|p| aggregate_velocity(&vels, NodeId::from(p), &fc[p], w).unwrap()).collect();
            let init = init_locations(e, &agg).unwrap();
            aggregate_neighborhood(&init, &g, e.num_timesteps() - 1).unwrap()
        };
        let base = run(&e);
        let moved = run(&e.translated(offset));
        for p in (0..n).map(NodeId::from) {
            for k in 0..e.dim() {
                prop_assert!((moved.get(p).unwrap()[k] - base.get(p).unwrap()[k] - offset[k]).abs() < 1e-9);
            }
        }
    }
}

#[test]
fn isolated_static_node_stays_put() {
    let e = EmbeddingSequence::from_vec(
        3,
        2,
        2,
        vec![1.0, 2.0, 5.0, 5.0, 1.0, 2.0, 5.0, 5.0, 1.0, 2.0, 5.0, 5.0],
    )
    .unwrap();
    let reg = NodeRegistry::from_labels(["a", "b"]).unwrap();
    let g = TemporalGraph::new(reg, vec![Vec::<(NodeId, NodeId)>::new(); 3]).unwrap();
    let vels = compute_velocities(&e).unwrap();
    let fc = predict_all(&Predictor::Persistence, &vels).unwrap();
    let w = HistoryWindow::new(3).unwrap();
    let agg: Vec<Vec<f64>> = (0..2)
        .map(|p| aggregate_velocity(&vels, NodeId(p as u32), &fc[p], w).unwrap())
        .collect();
    let locs = aggregate_neighborhood(&init_locations(&e, &agg).unwrap(), &g, 2).unwrap();
    assert_eq!(locs.get(NodeId(0)).unwrap(), &[1.0, 2.0]);
    assert_eq!(locs.get(NodeId(1)).unwrap(), &[5.0, 5.0]);
}

#[test]
fn aggregation_needs_enough_history() {
    let vels = VelocitySequence::from_vec(1, 2, 1, vec![1.0, 2.0]).unwrap();
    assert!(aggregate_velocity(&vels, NodeId(0), &[3.0], HistoryWindow::new(3).unwrap()).is_ok());
    assert!(aggregate_velocity(&vels, NodeId(0), &[3.0], HistoryWindow::new(4).unwrap()).is_err());
    assert!(HistoryWindow::new(1).is_err());
}
