//! Link scores from predicted locations.

use std::cmp::Ordering;
use std::io::Write;

use crate::error::{Error, Result};
use crate::graph::{NodeId, NodeRegistry};
use crate::ingest::Label;
use crate::kinematics::LocationSet;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScoredPair {
    pub u: NodeId,
    pub v: NodeId,
    pub distance: f64,
    /// Batch-rescaled similarity in `[0, 1]`.
    pub score: f64,
    pub label: Option<Label>,
}

impl ScoredPair {
    fn key(&self) -> (NodeId, NodeId) {
        (self.u.min(self.v), self.u.max(self.v))
    }
}

fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Similarity `1 / (1 + ‖a − b‖₂)` min-max rescaled over the batch.
///
/// A batch whose similarities are all equal scores 0.5 throughout.
pub fn score_pairs(locs: &LocationSet, pairs: &[(NodeId, NodeId)]) -> Result<Vec<ScoredPair>> {
    score_pairs_with(locs, pairs, |d| 1.0 / (1.0 + d))
}

/// [`score_pairs`] with a caller-supplied monotone decreasing similarity.
pub fn score_pairs_with(
    locs: &LocationSet,
    pairs: &[(NodeId, NodeId)],
    similarity: impl Fn(f64) -> f64,
) -> Result<Vec<ScoredPair>> {
    if pairs.is_empty() {
        return Err(Error::InvalidArgument("no pairs to score".into()));
    }
    let lookup = |p: NodeId| {
        locs.get(p).ok_or(Error::NodeOutOfRange {
            id: p.index(),
            len: locs.num_nodes(),
        })
    };
    let mut out = Vec::with_capacity(pairs.len());
    let mut raw = Vec::with_capacity(pairs.len());
    for &(u, v) in pairs {
        let distance = euclidean(lookup(u)?, lookup(v)?);
        raw.push(similarity(distance));
        out.push(ScoredPair {
            u,
            v,
            distance,
            score: 0.0,
            label: None,
        });
    }
    let lo = raw.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = raw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = hi - lo;
    for (s, r) in out.iter_mut().zip(raw) {
        s.score = if span > 0.0 {
            ((r - lo) / span).clamp(0.0, 1.0)
        } else {
            0.5
        };
    }
    Ok(out)
}

/// Top `k` pairs by descending score; ties go to the lexicographically
/// smaller `(min id, max id)`.
pub fn rank_candidates(scored: &[ScoredPair], k: usize) -> Result<Vec<ScoredPair>> {
    if k > scored.len() {
        return Err(Error::InvalidArgument(format!(
            "requested top {k} of {} scored pairs",
            scored.len()
        )));
    }
    let mut sorted = scored.to_vec();
    sorted.sort_by(|a, b| {
        b.score
            .partial_cmp(&a.score)
            .unwrap_or(Ordering::Equal)
            .then_with(|| a.key().cmp(&b.key()))
    });
    sorted.truncate(k);
    Ok(sorted)
}

/// Write `u_label,v_label,distance,score,label` rows.
pub fn write_scored_pairs<W: Write>(scored: &[ScoredPair], registry: &NodeRegistry, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let csv_err = |e: csv::Error| Error::Format(format!("writing scored pairs: {e}"));
    w.write_record(["u_label", "v_label", "distance", "score", "label"])
        .map_err(csv_err)?;
    for s in scored {
        let label = |p: NodeId| {
            registry
                .label(p)
                .map(str::to_owned)
                .ok_or(Error::UnknownLabel(p.to_string()))
        };
        w.write_record([
            label(s.u)?,
            label(s.v)?,
            s.distance.to_string(),
            s.score.to_string(),
            s.label.map(|l| l.as_i8().to_string()).unwrap_or_default(),
        ])
        .map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::io("<scored pairs>", e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kinematics::LocationStage;

    fn line(points: &[f64]) -> LocationSet {
        LocationSet::new(LocationStage::Agg, 1, points.to_vec()).unwrap()
    }

    #[test]
    fn distances_zero_one_two() {
        let locs = line(&[0.0, 0.0, 1.0, 2.0]);
        let s = score_pairs(
            &locs,
            &[(NodeId(0), NodeId(1)), (NodeId(0), NodeId(2)), (NodeId(0), NodeId(3))],
        )
        .unwrap();
        assert_eq!(s[0].distance, 0.0);
        assert!((s[0].score - 1.0).abs() < 1e-15);
        assert!((s[1].score - 0.25).abs() < 1e-15);
        assert!((s[2].score - 0.0).abs() < 1e-15);
    }

    #[test]
    fn single_pair_scores_half() {
        let s = score_pairs(&line(&[0.0, 3.0]), &[(NodeId(0), NodeId(1))]).unwrap();
        assert_eq!(s[0].score, 0.5);
    }

    #[test]
    fn unknown_node_is_error() {
        assert!(score_pairs(&line(&[0.0, 3.0]), &[(NodeId(0), NodeId(5))]).is_err());
        assert!(score_pairs(&line(&[0.0]), &[]).is_err());
    }

    #[test]
    fn ties_rank_lexicographically() {
        let locs = line(&[0.0, 1.0, 2.0, 3.0]);
        let pairs = [(NodeId(2), NodeId(3)), (NodeId(1), NodeId(0)), (NodeId(1), NodeId(2))];
        let s = score_pairs(&locs, &pairs).unwrap();
        let top = rank_candidates(&s, 3).unwrap();
        let keys: Vec<_> = top.iter().map(|p| p.key()).collect();
        assert_eq!(
            keys,
            vec![(NodeId(0), NodeId(1)), (NodeId(1), NodeId(2)), (NodeId(2), NodeId(3))]
        );
        assert!(rank_candidates(&s, 4).is_err());
    }
}
