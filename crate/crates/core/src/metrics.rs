//! Ranking metrics over labeled scores.
//!
//! AUROC is the tie-aware Mann–Whitney statistic, i.e. the probability that a
//! random positive outscores a random negative with ties counted half.
//! AUPRC is average precision: precision summed over recall increments with
//! tied scores treated as a single threshold.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::scoring::ScoredPair;

fn split_labels(scored: &[ScoredPair]) -> Result<(Vec<f64>, Vec<bool>)> {
    scored
        .iter()
        .map(|s| {
            s.label
                .map(|l| (s.score, l.is_positive()))
                .ok_or_else(|| Error::InvalidArgument(format!("pair ({}, {}) has no label", s.u, s.v)))
        })
        .collect::<Result<Vec<_>>>()
        .map(|v| v.into_iter().unzip())
}

pub fn auroc(scored: &[ScoredPair]) -> Result<f64> {
    let (scores, labels) = split_labels(scored)?;
    auroc_scores(&scores, &labels)
}

pub fn auprc(scored: &[ScoredPair]) -> Result<f64> {
    let (scores, labels) = split_labels(scored)?;
    auprc_scores(&scores, &labels)
}

fn check(scores: &[f64], labels: &[bool]) -> Result<()> {
    if scores.len() != labels.len() {
        return Err(Error::ShapeMismatch {
            expected: scores.len(),
            actual: labels.len(),
        });
    }
    if scores.iter().any(|s| s.is_nan()) {
        return Err(Error::NonFinite("score is NaN".into()));
    }
    Ok(())
}

/// Indices sorted by score using a total order, ties kept in input order.
fn sorted_indices(scores: &[f64], descending: bool) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..scores.len()).collect();
    idx.sort_by(|&a, &b| {
        let o = scores[a].partial_cmp(&scores[b]).unwrap_or(Ordering::Equal);
        if descending {
            o.reverse()
        } else {
            o
        }
    });
    idx
}

/// Rank-statistic AUROC on raw `(score, is_positive)` columns.
pub fn auroc_scores(scores: &[f64], labels: &[bool]) -> Result<f64> {
    check(scores, labels)?;
    let n_pos = labels.iter().filter(|&&l| l).count();
    let n_neg = labels.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(Error::InvalidArgument(format!(
            "AUROC needs both classes (got {n_pos} positives, {n_neg} negatives)"
        )));
    }
    let order = sorted_indices(scores, false);
    // Sum of (1-based, tie-averaged) ranks of the positives.
    let mut rank_sum = 0.0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && scores[order[j + 1]] == scores[order[i]] {
            j += 1;
        }
        let avg_rank = (i + j + 2) as f64 / 2.0;
        let pos_in_group = order[i..=j].iter().filter(|&&k| labels[k]).count();
        rank_sum += avg_rank * pos_in_group as f64;
        i = j + 1;
    }
    let (p, n) = (n_pos as f64, n_neg as f64);
    Ok((rank_sum - p * (p + 1.0) / 2.0) / (p * n))
}

/// Average precision on raw `(score, is_positive)` columns.
pub fn auprc_scores(scores: &[f64], labels: &[bool]) -> Result<f64> {
    check(scores, labels)?;
    let n_pos = labels.iter().filter(|&&l| l).count();
    if n_pos == 0 {
        return Err(Error::InvalidArgument("AUPRC needs at least one positive".into()));
    }
    let order = sorted_indices(scores, true);
    let (mut tp, mut fp) = (0usize, 0usize);
    let mut ap = 0.0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && scores[order[j + 1]] == scores[order[i]] {
            j += 1;
        }
        let group_pos = order[i..=j].iter().filter(|&&k| labels[k]).count();
        tp += group_pos;
        fp += j + 1 - i - group_pos;
        if group_pos > 0 {
            ap += (tp as f64 / (tp + fp) as f64) * (group_pos as f64 / n_pos as f64);
        }
        i = j + 1;
    }
    Ok(ap)
}
