//! Per-timestep node positions in a shared latent space.
//!
//! Positions either come from an external tool through the text embedding
//! format ([`load_embeddings`]) or from the built-in spectral embedder
//! ([`embed_aligned`]), which embeds each snapshot independently and then
//! rotates it onto the previous timestep with an orthogonal Procrustes fit.

mod io;
mod procrustes;
pub(crate) mod spectral;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{NodeId, TemporalGraph};
use crate::ingest::LabeledPairSet;
use crate::kinematics::{LocationSet, LocationStage};
use crate::scoring::{score_pairs, ScoredPair};

pub use io::{load_embeddings, read_embeddings_file, write_embeddings, write_embeddings_file};
pub use procrustes::{procrustes_objective, procrustes_rotation};

/// Positions `r_p^i` for timesteps `0..num_timesteps` and all registry nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingSequence {
    dim: usize,
    num_nodes: usize,
    num_timesteps: usize,
    data: Vec<f64>,
    degenerate: Vec<usize>,
}

impl EmbeddingSequence {
    /// Wrap timestep-major data (`[timestep][node][coord]`).
    pub fn from_vec(num_timesteps: usize, num_nodes: usize, dim: usize, data: Vec<f64>) -> Result<Self> {
        let expected = num_timesteps * num_nodes * dim;
        if data.len() != expected {
            return Err(Error::ShapeMismatch {
                expected,
                actual: data.len(),
            });
        }
        if dim == 0 {
            return Err(Error::InvalidArgument("embedding dimension must be at least 1".into()));
        }
        if let Some(k) = data.iter().position(|v| !v.is_finite()) {
            let per_step = num_nodes * dim;
            return Err(Error::NonFinite(format!(
                "position of node {} at timestep {}",
                (k % per_step) / dim,
                k / per_step
            )));
        }
        Ok(EmbeddingSequence {
            dim,
            num_nodes,
            num_timesteps,
            data,
            degenerate: Vec::new(),
        })
    }

    pub fn zeros(num_timesteps: usize, num_nodes: usize, dim: usize) -> Self {
        EmbeddingSequence {
            dim,
            num_nodes,
            num_timesteps,
            data: vec![0.0; num_timesteps * num_nodes * dim],
            degenerate: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_nodes(&self) -> usize {
        self.num_nodes
    }

    pub fn num_timesteps(&self) -> usize {
        self.num_timesteps
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// Timesteps whose snapshot had no edges and were emitted as zeros.
    pub fn degenerate_timesteps(&self) -> &[usize] {
        &self.degenerate
    }

    #[inline]
    fn offset(&self, i: usize, p: NodeId) -> usize {
        (i * self.num_nodes + p.index()) * self.dim
    }

    /// # Panics
    /// On out-of-range `i` or `p`.
    #[inline]
    pub fn position(&self, i: usize, p: NodeId) -> &[f64] {
        assert!(i < self.num_timesteps && p.index() < self.num_nodes);
        let o = self.offset(i, p);
        &self.data[o..o + self.dim]
    }

    pub fn position_mut(&mut self, i: usize, p: NodeId) -> &mut [f64] {
        assert!(i < self.num_timesteps && p.index() < self.num_nodes);
        let o = self.offset(i, p);
        &mut self.data[o..o + self.dim]
    }

    /// The `n × d` slab for timestep `i`.
    pub fn timestep(&self, i: usize) -> &[f64] {
        let step = self.num_nodes * self.dim;
        &self.data[i * step..(i + 1) * step]
    }

    /// Positions at timestep `i` as a location set.
    pub fn locations_at(&self, i: usize) -> Result<LocationSet> {
        if i >= self.num_timesteps {
            return Err(Error::TimestepOutOfRange {
                index: i,
                len: self.num_timesteps,
            });
        }
        LocationSet::new(LocationStage::Observed, self.dim, self.timestep(i).to_vec())
    }

    /// Consecutive timesteps `range`, re-indexed from zero.
    pub fn window(&self, range: std::ops::Range<usize>) -> Result<Self> {
        if range.start >= range.end || range.end > self.num_timesteps {
            return Err(Error::InvalidArgument(format!(
                "timestep window {range:?} invalid for {} timesteps",
                self.num_timesteps
            )));
        }
        let step = self.num_nodes * self.dim;
        Ok(EmbeddingSequence {
            dim: self.dim,
            num_nodes: self.num_nodes,
            num_timesteps: range.len(),
            data: self.data[range.start * step..range.end * step].to_vec(),
            degenerate: self
                .degenerate
                .iter()
                .filter(|i| range.contains(i))
                .map(|i| i - range.start)
                .collect(),
        })
    }

    /// Shift every position at every timestep by `offset`.
    pub fn translated(&self, offset: &[f64]) -> Self {
        assert_eq!(offset.len(), self.dim);
        let mut out = self.clone();
        for chunk in out.data.chunks_mut(self.dim) {
            for (x, c) in chunk.iter_mut().zip(offset) {
                *x += c;
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Alignment {
    Procrustes,
    None,
}

impl std::str::FromStr for Alignment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "procrustes" => Ok(Alignment::Procrustes),
            "none" => Ok(Alignment::None),
            other => Err(Error::InvalidArgument(format!("unknown alignment {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlignedEmbedderConfig {
    pub dim: usize,
    pub seed: u64,
    pub alignment: Alignment,
}

impl Default for AlignedEmbedderConfig {
    fn default() -> Self {
        AlignedEmbedderConfig {
            dim: 16,
            seed: 0,
            alignment: Alignment::Procrustes,
        }
    }
}

/// Flip each axis so that its largest-magnitude coordinate is positive.
fn fix_signs(x: &mut DMatrix<f64>) {
    for mut col in x.column_iter_mut() {
        let mut best = 0.0f64;
        for &v in col.iter() {
            if v.abs() > best.abs() {
                best = v;
            }
        }
        if best < 0.0 {
            col.neg_mut();
        }
    }
}

fn rows(x: &DMatrix<f64>, idx: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(idx.len(), x.ncols(), |r, c| x[(idx[r], c)])
}

/// Spectral embedding of every snapshot, aligned across time.
///
/// Nodes without edges in a snapshot keep their previous position. A
/// snapshot with no edges at all yields zero vectors and is listed in
/// [`EmbeddingSequence::degenerate_timesteps`]; later snapshots are then aligned
/// to the last non-degenerate one.
pub fn embed_aligned(g: &TemporalGraph, cfg: &AlignedEmbedderConfig) -> Result<EmbeddingSequence> {
    let n = g.num_nodes();
    let d = cfg.dim;
    if d == 0 || d > n {
        return Err(Error::InvalidArgument(format!(
            "embedding dimension {d} must lie in 1..={n} (number of nodes)"
        )));
    }

    let spectral: Vec<Option<DMatrix<f64>>> = g
        .snapshots()
        .par_iter()
        .map(|s| (s.num_edges() > 0).then(|| spectral::spectral_coordinates(s, d, cfg.seed)))
        .collect();

    let mut out = EmbeddingSequence::zeros(g.num_snapshots(), n, d);
    let mut prev: Option<DMatrix<f64>> = None;
    for (i, coords) in spectral.into_iter().enumerate() {
        let Some(mut x) = coords else {
            log::warn!("snapshot {i} has no edges; emitting zero positions");
            out.degenerate.push(i);
            continue;
        };
        let snap = g.snapshot(i)?;
        let active: Vec<usize> = (0..n)
            .filter(|&p| snap.degree(NodeId::from(p)).unwrap_or(0) > 0)
            .collect();

        match (&prev, cfg.alignment) {
            (Some(reference), Alignment::Procrustes) => {
                let q = procrustes_rotation(&rows(&x, &active), &rows(reference, &active));
                x *= q;
            }
            _ => fix_signs(&mut x),
        }
        if let Some(reference) = &prev {
            for p in 0..n {
                if snap.degree(NodeId::from(p))? == 0 {
                    x.row_mut(p).copy_from(&reference.row(p));
                }
            }
        }
        for p in 0..n {
            let dst = out.position_mut(i, NodeId::from(p));
            for (c, v) in dst.iter_mut().enumerate() {
                *v = x[(p, c)];
            }
        }
        prev = Some(x);
    }
    Ok(out)
}

/// Score pairs on the final-timestep positions with no dynamics applied.
pub fn raw_similarity_baseline(e: &EmbeddingSequence, pairs: &LabeledPairSet) -> Result<Vec<ScoredPair>> {
    if e.num_timesteps() == 0 {
        return Err(Error::InvalidArgument("empty embedding sequence".into()));
    }
    let locs = e.locations_at(e.num_timesteps() - 1)?;
    let mut scored = score_pairs(&locs, &pairs.node_pairs())?;
    for (s, p) in scored.iter_mut().zip(&pairs.pairs) {
        s.label = Some(p.label);
    }
    Ok(scored)
}
