//! Generated dynamic graphs with known latent motion.
//!
//! Two communities of points live in a plane. Each community translates at a
//! constant velocity toward the other, every node also jitters slightly per
//! step, and two nodes are linked in a snapshot whenever their latent points
//! are closer than `radius`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{NodeId, NodeRegistry, TemporalGraph};
use crate::ingest::EdgeEvent;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriftConfig {
    pub nodes_per_community: usize,
    pub snapshots: usize,
    /// Initial distance between the two community centres.
    pub gap: f64,
    /// Standard deviation of each node's offset from its centre.
    pub spread: f64,
    /// Distance each community moves per snapshot.
    pub speed: f64,
    /// Per-step positional noise.
    pub jitter: f64,
    pub radius: f64,
    pub seed: u64,
}

impl Default for DriftConfig {
    fn default() -> Self {
        DriftConfig {
            nodes_per_community: 30,
            snapshots: 10,
            gap: 6.0,
            spread: 1.0,
            speed: 0.35,
            jitter: 0.05,
            radius: 1.4,
            seed: 0,
        }
    }
}

impl DriftConfig {
    fn validate(&self) -> Result<()> {
        let positive = [self.gap, self.spread, self.radius];
        if self.nodes_per_community < 2 || self.snapshots < 2 {
            return Err(Error::InvalidArgument(
                "need at least 2 nodes per community and 2 snapshots".into(),
            ));
        }
        if positive.iter().any(|x| !(*x > 0.0 && x.is_finite())) || !(self.jitter >= 0.0) || !self.speed.is_finite() {
            return Err(Error::InvalidArgument(format!("invalid drift parameters {self:?}")));
        }
        Ok(())
    }
}

/// Latent positions `[snapshot][node] -> (x, y)`. Community 0 holds nodes
/// `0..n`, community 1 holds `n..2n`.
pub fn drift_trajectories(cfg: &DriftConfig) -> Result<Vec<Vec<[f64; 2]>>> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let offset = Normal::new(0.0, cfg.spread).expect("positive spread");
    let n = cfg.nodes_per_community;
    let mut base: Vec<[f64; 2]> = Vec::with_capacity(2 * n);
    for community in 0..2 {
        let cx = if community == 0 { -cfg.gap / 2.0 } else { cfg.gap / 2.0 };
        for _ in 0..n {
            base.push([cx + offset.sample(&mut rng), offset.sample(&mut rng)]);
        }
    }
    let mut out = Vec::with_capacity(cfg.snapshots);
    for t in 0..cfg.snapshots {
        let shift = cfg.speed * t as f64;
        let frame = base
            .iter()
            .enumerate()
            .map(|(p, b)| {
                let dir = if p < n { 1.0 } else { -1.0 };
                let jx = cfg.jitter * (2.0 * rng.random::<f64>() - 1.0);
                let jy = cfg.jitter * (2.0 * rng.random::<f64>() - 1.0);
                [b[0] + dir * shift + jx, b[1] + jy]
            })
            .collect();
        out.push(frame);
    }
    Ok(out)
}

/// Proximity graph over [`drift_trajectories`]; node labels are `a0..` and `b0..`.
pub fn drift_graph(cfg: &DriftConfig) -> Result<TemporalGraph> {
    let frames = drift_trajectories(cfg)?;
    let n = cfg.nodes_per_community;
    let labels = (0..2 * n).map(|p| if p < n { format!("a{p}") } else { format!("b{}", p - n) });
    let registry = NodeRegistry::from_labels(labels)?;
    let lists = frames.iter().map(|frame| {
        let mut edges = Vec::new();
        for u in 0..frame.len() {
            for v in u + 1..frame.len() {
                let (dx, dy) = (frame[u][0] - frame[v][0], frame[u][1] - frame[v][1]);
                if (dx * dx + dy * dy).sqrt() < cfg.radius {
                    edges.push((NodeId::from(u), NodeId::from(v)));
                }
            }
        }
        edges
    });
    TemporalGraph::new(registry, lists.collect::<Vec<_>>())
}

/// Flatten a graph into `(time, u, v)` events with integer snapshot times.
pub fn graph_events(g: &TemporalGraph) -> Vec<EdgeEvent> {
    let label = |p: NodeId| g.registry().label(p).unwrap_or_default().to_owned();
    g.snapshots()
        .iter()
        .flat_map(|s| {
            s.edges().iter().map(move |&(u, v)| EdgeEvent {
                time: s.index() as f64,
                u: label(u),
                v: label(v),
            })
        })
        .collect()
}
