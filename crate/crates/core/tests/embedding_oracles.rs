use kinemb::embedding::{
    embed_aligned, load_embeddings, procrustes_objective, procrustes_rotation, raw_similarity_baseline,
    write_embeddings, AlignedEmbedderConfig, EmbeddingSequence,
};
use kinemb::graph::{NodeId, NodeRegistry, TemporalGraph};
use kinemb::ingest::{Label, LabeledPair, LabeledPairSet};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_orthogonal(d: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    let a = DMatrix::from_fn(d, d, |_, _| rng.random::<f64>() - 0.5);
    a.qr().q()
}

fn random_matrix(n: usize, d: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    DMatrix::from_fn(n, d, |_, _| 2.0 * rng.random::<f64>() - 1.0)
}

#[test]
fn rotation_is_orthogonal() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..20 {
        let d = rng.random_range(1..6);
        let (a, b) = (random_matrix(12, d, &mut rng), random_matrix(12, d, &mut rng));
        let q = procrustes_rotation(&a, &b);
        assert!((q.transpose() * &q - DMatrix::identity(d, d)).abs().max() < 1e-10);
    }
}

#[test]
fn rotation_beats_random_orthogonal_transforms() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..5 {
        let n = rng.random_range(2..=6);
        let d = rng.random_range(1..=3);
        let (a, b) = (random_matrix(n, d, &mut rng), random_matrix(n, d, &mut rng));
        let best = procrustes_objective(&a, &b, &procrustes_rotation(&a, &b));
        for _ in 0..1000 {
            let q = random_orthogonal(d, &mut rng);
            assert!(best <= procrustes_objective(&a, &b, &q) + 1e-12);
        }
    }
}

#[test]
fn planted_rotation_is_undone() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let x = random_matrix(30, 4, &mut rng);
    let r = random_orthogonal(4, &mut rng);
    let rotated = &x * &r;
    let q = procrustes_rotation(&rotated, &x);
    let recovered = rotated * q;
    for p in 0..30 {
        assert!((recovered.row(p) - x.row(p)).norm() < 1e-6);
    }
}

fn cliques(k: usize, t: usize) -> TemporalGraph {
    let reg = NodeRegistry::from_labels((0..2 * k).map(|i| i.to_string())).unwrap();
    let mut edges = Vec::new();
    for base in [0, k] {
        for u in base..base + k {
            for v in u + 1..base + k {
                edges.push((NodeId::from(u), NodeId::from(v)));
            }
        }
    }
    TemporalGraph::new(reg, vec![edges; t]).unwrap()
}

#[test]
fn static_graph_has_zero_displacement() {
    let g = kinemb::synthetic::drift_graph(&Default::default()).unwrap();
    let frozen = TemporalGraph::new(g.registry().clone(), vec![g.snapshot(4).unwrap().edges().to_vec(); 4]).unwrap();
    let e = embed_aligned(
        &frozen,
        &AlignedEmbedderConfig {
            dim: 6,
            ..Default::default()
        },
    )
    .unwrap();
    for i in 1..4 {
        for p in frozen.registry().ids() {
            let step: f64 = e
                .position(i, p)
                .iter()
                .zip(e.position(i - 1, p))
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            assert!(step < 1e-6, "node {p} moved {step} at {i}");
        }
    }
}

#[test]
fn disconnected_cliques_separate() {
    let k = 5;
    let g = cliques(k, 3);
    let e = embed_aligned(
        &g,
        &AlignedEmbedderConfig {
            dim: 2,
            ..Default::default()
        },
    )
    .unwrap();
    let dist = |i: usize, a: usize, b: usize| -> f64 {
        e.position(i, NodeId::from(a))
            .iter()
            .zip(e.position(i, NodeId::from(b)))
            .map(|(x, y)| (x - y) * (x - y))
            .sum::<f64>()
            .sqrt()
    };
    for i in 0..3 {
        let mut within = 0.0f64;
        let mut between = f64::INFINITY;
        for a in 0..2 * k {
            for b in a + 1..2 * k {
                if (a < k) == (b < k) {
                    within = within.max(dist(i, a, b));
                } else {
                    between = between.min(dist(i, a, b));
                }
            }
        }
        assert!(within < between, "snapshot {i}: {within} vs {between}");
    }
}

#[test]
fn dimension_above_node_count_is_rejected() {
    let g = cliques(2, 2);
    assert!(embed_aligned(
        &g,
        &AlignedEmbedderConfig {
            dim: 5,
            ..Default::default()
        }
    )
    .is_err());
}

#[test]
fn embedding_file_round_trip_is_bit_exact() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let g = cliques(3, 3);
    let data: Vec<f64> = (0..3 * 6 * 4).map(|_| rng.random::<f64>() * 1e3 - 500.0).collect();
    let e = EmbeddingSequence::from_vec(3, 6, 4, data).unwrap();
    let mut buf = Vec::new();
    write_embeddings(&e, &g, &mut buf).unwrap();
    let back = load_embeddings(buf.as_slice(), &g).unwrap();
    assert_eq!(back.as_slice(), e.as_slice());
}

#[test]
fn baseline_order_matches_distance_sort() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let n = 12;
    let reg = NodeRegistry::from_labels((0..n).map(|i| i.to_string())).unwrap();
    let g = TemporalGraph::new(reg, vec![vec![(NodeId(0), NodeId(1))]; 2]).unwrap();
    let e = EmbeddingSequence::from_vec(2, n, 3, (0..2 * n * 3).map(|_| rng.random::<f64>()).collect()).unwrap();
    let mut pairs = Vec::new();
    while pairs.len() < 20 {
        let (u, v) = (rng.random_range(0..n as u32), rng.random_range(0..n as u32));
        if u != v {
            pairs.push(LabeledPair {
                u: NodeId(u),
                v: NodeId(v),
                label: if pairs.len() % 2 == 0 {
                    Label::Positive
                } else {
                    Label::Negative
                },
            });
        }
    }
    let set = LabeledPairSet { pairs, timestep: 1 };
    let scored = raw_similarity_baseline(&e, &set).unwrap();
    let last = |p: NodeId| e.position(1, p).to_vec();
    let dist = |a: NodeId, b: NodeId| {
        last(a)
            .iter()
            .zip(last(b))
            .map(|(x, y)| (x - y).powi(2))
            .sum::<f64>()
            .sqrt()
    };
    for a in &scored {
        for b in &scored {
            if dist(a.u, a.v) < dist(b.u, b.v) {
                assert!(a.score >= b.score);
            }
        }
    }
    let _ = g;
}
