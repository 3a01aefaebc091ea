//! Node dynamics in embedding space.
//!
//! Nodes are treated as point masses: their displacement between consecutive
//! timesteps is a velocity, recent velocities (including a forecast of the
//! next one) are combined with linearly increasing recency weights, the
//! result is added to the last observed position, and finally each node's
//! provisional location is averaged with those of its one-hop neighbors.

use serde::{Deserialize, Serialize};

use crate::embedding::EmbeddingSequence;
use crate::error::{Error, Result};
use crate::graph::{NodeId, TemporalGraph};

/// Velocities `Vel_p^τ = r_p^τ − r_p^{τ−1}` for `τ = 1..=t`, stored per node.
#[derive(Debug, Clone, PartialEq)]
pub struct VelocitySequence {
    dim: usize,
    num_nodes: usize,
    steps: usize,
    data: Vec<f64>,
}

impl VelocitySequence {
    /// Wrap node-major data (`[node][step][coord]`).
    pub fn from_vec(num_nodes: usize, steps: usize, dim: usize, data: Vec<f64>) -> Result<Self> {
        let expected = num_nodes * steps * dim;
        if data.len() != expected {
            return Err(Error::ShapeMismatch {
                expected,
                actual: data.len(),
            });
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("velocity".into()));
        }
        Ok(VelocitySequence {
            dim,
            num_nodes,
            steps,
            data,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_nodes(&self) -> usize {
        self.num_nodes
    }

    /// Number of observed velocities per node (`t`).
    pub fn steps(&self) -> usize {
        self.steps
    }

    /// `Vel_p^τ` for `τ` in `1..=steps`.
    pub fn velocity(&self, p: NodeId, tau: usize) -> &[f64] {
        assert!(
            tau >= 1 && tau <= self.steps,
            "velocity step {tau} outside 1..={}",
            self.steps
        );
        let o = (p.index() * self.steps + tau - 1) * self.dim;
        &self.data[o..o + self.dim]
    }

    /// All velocities of `p`, oldest first, flattened.
    pub fn history(&self, p: NodeId) -> &[f64] {
        let len = self.steps * self.dim;
        &self.data[p.index() * len..(p.index() + 1) * len]
    }

    /// The `count` most recent velocities of `p`, oldest first.
    pub fn trailing(&self, p: NodeId, count: usize) -> Result<Vec<&[f64]>> {
        if count > self.steps {
            return Err(Error::InsufficientHistory(format!(
                "requested {count} trailing velocities, only {} observed",
                self.steps
            )));
        }
        Ok((self.steps - count + 1..=self.steps)
            .map(|tau| self.velocity(p, tau))
            .collect())
    }
}

/// First differences of the position sequence.
pub fn compute_velocities(e: &EmbeddingSequence) -> Result<VelocitySequence> {
    let t1 = e.num_timesteps();
    if t1 < 2 {
        return Err(Error::InsufficientHistory(format!(
            "velocities need at least 2 timesteps, got {t1}"
        )));
    }
    let (n, d, steps) = (e.num_nodes(), e.dim(), t1 - 1);
    let mut data = Vec::with_capacity(n * steps * d);
    for p in (0..n).map(NodeId::from) {
        for tau in 1..t1 {
            let cur = e.position(tau, p);
            let prev = e.position(tau - 1, p);
            data.extend(cur.iter().zip(prev).map(|(a, b)| a - b));
        }
    }
    VelocitySequence::from_vec(n, steps, d, data)
}

/// History length `h`: how many of the most recent velocities, the forecast
/// included, enter the weighted aggregate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct HistoryWindow(usize);

impl HistoryWindow {
    pub fn new(h: usize) -> Result<Self> {
        if h < 2 {
            return Err(Error::InvalidArgument(format!(
                "history length must be at least 2, got {h}"
            )));
        }
        Ok(HistoryWindow(h))
    }

    pub fn get(self) -> usize {
        self.0
    }

    /// Weights `2η / (h(h+1))` for `η = 1..=h`, oldest first.
    pub fn weights(self) -> Vec<f64> {
        let h = self.0 as f64;
        let norm = 2.0 / (h * (h + 1.0));
        (1..=self.0).map(|eta| eta as f64 * norm).collect()
    }
}

/// Recency-weighted sum of a velocity window given oldest first.
pub fn weighted_recent_sum(window: &[&[f64]]) -> Result<Vec<f64>> {
    let w = HistoryWindow::new(window.len())?;
    let d = window[0].len();
    let mut out = vec![0.0; d];
    for (v, weight) in window.iter().zip(w.weights()) {
        if v.len() != d {
            return Err(Error::ShapeMismatch {
                expected: d,
                actual: v.len(),
            });
        }
        for (o, x) in out.iter_mut().zip(v.iter()) {
            *o += weight * x;
        }
    }
    Ok(out)
}

/// Aggregate the `h − 1` latest observed velocities of `p` with the
/// forecast `predicted` (which takes the largest weight).
pub fn aggregate_velocity(vels: &VelocitySequence, p: NodeId, predicted: &[f64], w: HistoryWindow) -> Result<Vec<f64>> {
    if predicted.len() != vels.dim() {
        return Err(Error::ShapeMismatch {
            expected: vels.dim(),
            actual: predicted.len(),
        });
    }
    if p.index() >= vels.num_nodes() {
        return Err(Error::NodeOutOfRange {
            id: p.index(),
            len: vels.num_nodes(),
        });
    }
    let observed = w.get() - 1;
    if observed > vels.steps() {
        return Err(Error::InsufficientHistory(format!(
            "history length {} needs {observed} observed velocities but only {} exist (t + 1 = {} < h)",
            w.get(),
            vels.steps(),
            vels.steps() + 1
        )));
    }
    let mut window = vels.trailing(p, observed)?;
    window.push(predicted);
    weighted_recent_sum(&window)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LocationStage {
    /// Positions as embedded, no dynamics applied.
    Observed,
    /// `r_p^t` plus the aggregated velocity.
    Init,
    /// Neighborhood average of `Init` locations.
    Agg,
}

/// One location vector per registry node.
#[derive(Debug, Clone, PartialEq)]
pub struct LocationSet {
    stage: LocationStage,
    dim: usize,
    data: Vec<f64>,
}

impl LocationSet {
    pub fn new(stage: LocationStage, dim: usize, data: Vec<f64>) -> Result<Self> {
        if dim == 0 || !data.len().is_multiple_of(dim) {
            return Err(Error::ShapeMismatch {
                expected: dim,
                actual: data.len(),
            });
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("location".into()));
        }
        Ok(LocationSet { stage, dim, data })
    }

    pub fn stage(&self) -> LocationStage {
        self.stage
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_nodes(&self) -> usize {
        self.data.len() / self.dim
    }

    pub fn get(&self, p: NodeId) -> Option<&[f64]> {
        let o = p.index() * self.dim;
        self.data.get(o..o + self.dim)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }
}

/// `Loc_p^Init = agg_vel + r_p^t`, where `t` is the last embedded timestep.
pub fn init_location(e: &EmbeddingSequence, agg_vel: &[f64], p: NodeId) -> Result<Vec<f64>> {
    if agg_vel.len() != e.dim() {
        return Err(Error::ShapeMismatch {
            expected: e.dim(),
            actual: agg_vel.len(),
        });
    }
    if p.index() >= e.num_nodes() {
        return Err(Error::NodeOutOfRange {
            id: p.index(),
            len: e.num_nodes(),
        });
    }
    let last = e.position(e.num_timesteps() - 1, p);
    Ok(last.iter().zip(agg_vel).map(|(r, v)| r + v).collect())
}

/// Initial locations for all nodes from their aggregated velocities.
pub fn init_locations(e: &EmbeddingSequence, agg_vels: &[Vec<f64>]) -> Result<LocationSet> {
    if agg_vels.len() != e.num_nodes() {
        return Err(Error::ShapeMismatch {
            expected: e.num_nodes(),
            actual: agg_vels.len(),
        });
    }
    let mut data = Vec::with_capacity(e.num_nodes() * e.dim());
    for (p, v) in agg_vels.iter().enumerate() {
        data.extend(init_location(e, v, NodeId::from(p))?);
    }
    LocationSet::new(LocationStage::Init, e.dim(), data)
}

/// Mean of `Loc^Init` over `N(p) ∪ {p}` with neighborhoods from snapshot `i`.
pub fn aggregate_neighborhood(inits: &LocationSet, g: &TemporalGraph, i: usize) -> Result<LocationSet> {
    if inits.stage() != LocationStage::Init {
        return Err(Error::InvalidArgument(format!(
            "neighborhood aggregation expects init locations, got {:?}",
            inits.stage()
        )));
    }
    if inits.num_nodes() != g.num_nodes() {
        return Err(Error::ShapeMismatch {
            expected: g.num_nodes(),
            actual: inits.num_nodes(),
        });
    }
    let snap = g.snapshot(i)?;
    let d = inits.dim();
    let mut data = Vec::with_capacity(inits.as_slice().len());
    for p in g.registry().ids() {
        let nbrs = snap.neighbors(p)?;
        let mut acc = inits.get(p).expect("node in range").to_vec();
        for &q in nbrs {
            for (a, x) in acc.iter_mut().zip(inits.get(q).expect("node in range")) {
                *a += x;
            }
        }
        let scale = 1.0 / (nbrs.len() + 1) as f64;
        data.extend(acc.into_iter().map(|a| a * scale));
    }
    debug_assert_eq!(data.len(), g.num_nodes() * d);
    LocationSet::new(LocationStage::Agg, d, data)
}
